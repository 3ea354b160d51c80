"""Exact invariant checks on a built curve family.

Each check returns a :class:`Tally`: how many instances were examined and
the ones that failed.  Nothing here is approximate; every comparison is
between rationals.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from itertools import combinations

from .incidence import CurveFamily, incidence_structure, pair_stats


@dataclass
class Tally:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, passed: bool, detail=None) -> None:
        self.checked += 1
        if not passed:
            self.failures.append(detail)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.checked - len(self.failures)}/{self.checked}"


def check_vertices(family: CurveFamily) -> list[Tally]:
    """Vertices sit on the grid and within ``delta/2`` of their line."""
    on_grid = Tally("vertex on grid")
    near = Tally("vertex deviation <= delta/2")
    half = family.delta / 2
    for cid, c in enumerate(family.curves):
        for v in c.vertices:
            on_grid.record(v.x in family.X and v.y in family.Y, (cid, v))
            near.record(abs(v.y - c.line_value(v.x)) <= half, (cid, v))
    return [on_grid, near]


def check_pairs(family: CurveFamily, method: str = "auto", threads: int = 1) -> list[Tally]:
    """Crossing window, per-pair multiplicity bound and one crossing per slab."""
    stats = pair_stats(family, method, threads, record=True)
    curves = family.curves
    two = 2 * family.delta
    window = Tally("contact window |(c-a)x + ab - cd| < 2 delta")
    by_pair: dict = {}
    for id1, id2, ct in stats.contacts:
        c1, c2 = curves[id1], curves[id2]
        gap = c2.line_value(ct.x) - c1.line_value(ct.x)
        window.record(abs(gap) < two, (id1, id2, ct))
        by_pair.setdefault((id1, id2), []).append(ct)

    bound = Tally("multiplicity <= 1 + 4 delta/(c-a)")
    slab = Tally("at most one crossing per slab")
    for (id1, id2), cts in sorted(by_pair.items()):
        if len(cts) == 1:
            # a single contact satisfies both checks outright
            bound.record(True)
            slab.record(True)
            continue
        c1, c2 = curves[id1], curves[id2]
        a, c = sorted((c1.slope, c2.slope))
        if a != c:
            bound.record(len(cts) <= 1 + 4 * family.delta / (c - a), (id1, id2, len(cts)))
        else:
            # parallel lines: any contact means the offsets nearly coincide
            bound.record(False, (id1, id2, len(cts)))
        xs1, xs2 = c1.xs, c2.xs
        slabs = []
        for ct in cts:
            k1, k2 = bisect.bisect_left(xs1, ct.x), bisect.bisect_left(xs2, ct.x)
            on_break = (k1 < len(xs1) and xs1[k1] == ct.x) or (k2 < len(xs2) and xs2[k2] == ct.x)
            if ct.kind == "crossing" and not on_break:
                slabs.append((k1, k2))
        slab.record(len(slabs) == len(set(slabs)), (id1, id2))
    return [window, bound, slab]


def check_shared_pairs(family: CurveFamily, method: str = "auto") -> list[Tally]:
    """Curves through two common grid points: slope spread and distinct slopes.

    Both curves stay within ``delta/2`` of their lines, so at either point the
    lines are at most ``delta`` apart and ``|a_i - a_j| * gap <= 2 delta``.
    """
    s = incidence_structure(family, method)
    curves = family.curves
    two = 2 * family.delta
    spread = Tally("slope spread |a_i - a_j| * gap <= 2 delta")
    distinct = Tally("curves through a point pair have distinct slopes")

    through: dict = {}
    for cid, pts in enumerate(s.points):
        for p in pts:
            through.setdefault(p, []).append(cid)
    shared: dict = {}
    for p, cids in through.items():
        for pair in combinations(cids, 2):
            shared.setdefault(pair, []).append(p)
    for (i, j), pts in sorted(shared.items()):
        if len(pts) < 2:
            continue
        pts = sorted(s.point(p) for p in pts)
        gap = pts[-1].x - pts[0].x
        da = abs(curves[i].slope - curves[j].slope)
        spread.record(da * gap <= two, (i, j))
        distinct.record(da != 0, (i, j))

    witness = Tally("m1 witness slope spread and offset uniqueness")
    if s.witness is not None and len(s.witness_curves) >= 1:
        p, q = s.witness
        slopes = [curves[c].slope for c in s.witness_curves]
        ok = len(set(slopes)) == len(slopes)
        ok = ok and all(abs(u - v) * (q.x - p.x) <= two for u, v in combinations(slopes, 2))
        witness.record(ok and len(s.witness_curves) == s.m1, s.witness)
    return [spread, distinct, witness]


def check_counts(family: CurveFamily, method: str = "auto") -> list[Tally]:
    s = incidence_structure(family, method)
    n, ell = len(family.B), len(family)
    t = Tally("I >= |B|^3 and e = I - ell and ell = |B|^2")
    e = s.incidences - ell
    t.record(s.incidences >= n ** 3 and e == sum(len(p) - 1 for p in s.points) and ell == n * n)
    m = Tally("m1 >= 1 whenever a curve holds two grid points")
    m.record(s.m1 >= 1 if any(len(p) >= 2 for p in s.points) else s.m1 == 0)
    return [t, m]


def check_family(family: CurveFamily, method: str = "auto", threads: int = 1) -> list[Tally]:
    return (
        check_vertices(family)
        + check_pairs(family, method, threads)
        + check_shared_pairs(family, method)
        + check_counts(family, method)
    )


def tallies_ok(tallies) -> bool:
    return all(t.ok for t in tallies)

