"""Delta-grid, polygonal curve families and exact incidence/intersection counts.

Curves are the polylines through ``(x, <a*(x-b)>)`` for ``x in B + b``,
where ``<t>`` rounds to the nearest multiple of the grid spacing.  Two
curves meet in a finite set of *contacts* under the following convention,
which stands in for an infinitesimal perturbation of the curves:

* an isolated common point counts once (transversal crossing, touch, or a
  shared vertex);
* a collinear overlap counts the vertices it shares with both curves, and
  once if it happens to share none.

A contact is a *crossing* of the drawing when it is not a grid point: at a
grid point both curves pass through a graph node, so no edges cross there.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Callable, NamedTuple, Optional, Sequence

from .scalar import ScalarLike, as_scalar, round_to_grid
from .sets import PointSet, productset, sumset


class GridPoint(NamedTuple):
    x: Fraction
    y: Fraction


class Contact(NamedTuple):
    x: Fraction
    y: Fraction
    kind: str  # "crossing", "touch", "shared", "overlap"


@dataclass(frozen=True)
class PolygonalCurve:
    slope: Fraction
    offset: Fraction
    vertices: tuple[GridPoint, ...]

    @property
    def xs(self) -> list[Fraction]:
        return [v.x for v in self.vertices]

    @property
    def ys(self) -> list[Fraction]:
        return [v.y for v in self.vertices]

    def line_value(self, x: Fraction) -> Fraction:
        return self.slope * (x - self.offset)

    def y_at(self, x: Fraction) -> Optional[Fraction]:
        """Height of the polyline above ``x`` (None outside its span)."""
        return interpolate(self.xs, self.ys, x)

    def segments(self):
        return list(zip(self.vertices, self.vertices[1:]))


def interpolate(xs: Sequence, ys: Sequence, x) -> Optional[Fraction]:
    if x < xs[0] or x > xs[-1]:
        return None
    k = bisect.bisect_left(xs, x)
    if xs[k] == x:
        return Fraction(ys[k])
    x0, x1, y0, y1 = xs[k - 1], xs[k], ys[k - 1], ys[k]
    return y0 + Fraction((y1 - y0) * (x - x0), x1 - x0)


def walk_contacts(xs1, ys1, xs2, ys2, lo=None, hi=None) -> list[Contact]:
    """Contacts of two x-monotone polylines by a merge walk over breakpoints.

    Coordinates may be ints or Fractions.  ``lo``/``hi`` restrict the walk to
    a sub-range; callers must make sure no contact sits on a cut that is not
    a genuine end of the common span.
    """
    L = max(xs1[0], xs2[0])
    U = min(xs1[-1], xs2[-1])
    if lo is not None:
        L = max(L, lo)
    if hi is not None:
        U = min(U, hi)
    if L > U:
        return []
    bps = {L, U}
    for xs in (xs1, xs2):
        i = bisect.bisect_left(xs, L)
        j = bisect.bisect_right(xs, U)
        bps.update(xs[i:j])
    bps = sorted(bps)
    v1, v2 = set(xs1), set(xs2)
    y1 = [interpolate(xs1, ys1, x) for x in bps]
    h = [a - interpolate(xs2, ys2, x) for a, x in zip(y1, bps)]

    out: list[Contact] = []
    t, count = 0, len(bps)
    while t < count:
        if h[t] == 0:
            s = t
            while t + 1 < count and h[t + 1] == 0:
                t += 1
            if s == t:
                x = bps[s]
                kind = "shared" if x in v1 and x in v2 else "touch"
                out.append(Contact(Fraction(x), y1[s], kind))
            else:
                shared = [r for r in range(s, t + 1) if bps[r] in v1 and bps[r] in v2]
                for r in shared or [s]:
                    out.append(Contact(Fraction(bps[r]), y1[r], "overlap"))
        elif t + 1 < count and h[t + 1] != 0 and (h[t] > 0) != (h[t + 1] > 0):
            x0, x1 = bps[t], bps[t + 1]
            x = x0 + (x1 - x0) * h[t] / (h[t] - h[t + 1])
            out.append(Contact(Fraction(x), interpolate(xs1, ys1, x), "crossing"))
        t += 1
    return out


def curve_contacts(c1: PolygonalCurve, c2: PolygonalCurve) -> list[Contact]:
    return walk_contacts(c1.xs, c1.ys, c2.xs, c2.ys)


def pairwise_intersections(c1: PolygonalCurve, c2: PolygonalCurve) -> int:
    """Intersection multiplicity of two distinct curves under the contact convention."""
    if c1 == c2:
        raise ValueError("pairwise_intersections needs two distinct curves")
    return len(curve_contacts(c1, c2))


def build_grid(B: PointSet, delta: ScalarLike) -> tuple[PointSet, PointSet]:
    """``X = B + B`` and ``Y`` = the products ``B.B`` rounded to the grid."""
    delta = as_scalar(delta)
    return sumset(B, B), productset(B, B, delta)


def grid_warnings(B: PointSet) -> list[str]:
    out = []
    if not B.is_separated(1):
        out.append("B is not 1-separated")
    if len(B) and B[-1] >= 2 * B[0]:
        out.append("B does not fit in a single interval [x, 2x)")
    return out


def make_curve(a: Fraction, b: Fraction, B: PointSet, delta: Fraction) -> PolygonalCurve:
    verts = tuple(GridPoint(b + t, round_to_grid(a * t, delta)) for t in B)
    return PolygonalCurve(a, b, verts)


@dataclass(frozen=True)
class CurveFamily:
    """One curve per ordered pair ``(a, b)`` of ``B``, in lexicographic order."""

    B: PointSet
    delta: Fraction
    curves: tuple[PolygonalCurve, ...]
    X: PointSet
    Y: PointSet
    warnings: tuple[str, ...] = ()
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.curves)

    def index(self, i: int, j: int) -> int:
        return i * len(self.B) + j

    def subfamily(self, ids: Sequence[int]) -> "CurveFamily":
        return CurveFamily(self.B, self.delta, tuple(self.curves[i] for i in ids), self.X, self.Y, self.warnings)


def build_curves(B: PointSet, delta: ScalarLike) -> CurveFamily:
    delta = as_scalar(delta)
    if delta <= 0:
        raise ValueError("grid spacing must be positive")
    X, Y = build_grid(B, delta)
    curves = tuple(make_curve(a, b, B, delta) for a in B for b in B)
    return CurveFamily(B, delta, curves, X, Y, tuple(grid_warnings(B)))


def is_grid_point(x: Fraction, y: Fraction, X: PointSet, Y: PointSet) -> bool:
    return x in X and y in Y


def curve_grid_points(curve: PolygonalCurve, X: PointSet, Y: PointSet) -> list[GridPoint]:
    """Grid points of ``X x Y`` on the closed polyline, in x order."""
    out = []
    xs = X.elements
    for (p, q) in curve.segments():
        out.append(p)
        i = bisect.bisect_right(xs, p.x)
        j = bisect.bisect_left(xs, q.x)
        for x in xs[i:j]:
            y = p.y + (q.y - p.y) * (x - p.x) / (q.x - p.x)
            if y in Y:
                out.append(GridPoint(x, y))
    out.append(curve.vertices[-1])
    return out


# Family-level quantities.  Small families go through the reference walk on
# every pair; larger ones use the vectorised engine in ``sweep``.  Both are
# exact and are checked against each other in the test-suite.

REFERENCE_LIMIT = 100  # curves


def _use_reference(family: CurveFamily, method: str) -> bool:
    if method not in ("auto", "reference", "fast"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        return len(family) <= REFERENCE_LIMIT or len(family.curves) != len(family.B) ** 2
    return method == "reference"


@dataclass
class PairStats:
    """Totals over all unordered curve pairs."""

    pairs: int
    total: int  # sum of multiplicities
    crossings: int  # contacts away from grid points
    max_multiplicity: int
    multi: dict  # (id1, id2) -> contacts, for pairs with multiplicity >= 2
    contacts: Optional[list] = None  # (id1, id2, Contact) when recorded


def reference_pair_stats(family: CurveFamily, record: bool = False) -> PairStats:
    total = crossings = best = 0
    multi, recs = {}, [] if record else None
    for (i, c1), (j, c2) in combinations(enumerate(family.curves), 2):
        cs = curve_contacts(c1, c2)
        if not cs:
            continue
        total += len(cs)
        best = max(best, len(cs))
        crossings += sum(1 for c in cs if not is_grid_point(c.x, c.y, family.X, family.Y))
        if len(cs) >= 2:
            multi[(i, j)] = tuple(cs)
        if record:
            recs.extend((i, j, c) for c in cs)
    return PairStats(comb(len(family), 2), total, crossings, best, multi, recs)


def pair_stats(family: CurveFamily, method: str = "auto", threads: int = 1, record: bool = False) -> PairStats:
    key = ("pairs", method, record)
    if key not in family.cache:
        if _use_reference(family, method):
            family.cache[key] = reference_pair_stats(family, record)
        else:
            from .sweep import sweep_pairs

            family.cache[key] = sweep_pairs(family, threads=threads, record=record)
    return family.cache[key]


@dataclass
class IncidenceStructure:
    """Grid points on every curve, plus the derived multiplicities."""

    incidences: int
    points: list  # per curve, its grid points in x order
    m1: int
    witness: Optional[tuple]  # lexicographically smallest point pair attaining m1
    witness_curves: tuple  # curve ids through both witness points
    edge_multiplicity: int  # most curves sharing one consecutive point pair
    to_point: Optional[Callable] = None  # maps entries of ``points`` to GridPoints

    def point(self, p) -> GridPoint:
        return GridPoint(*p) if self.to_point is None else self.to_point(p)


def _structure_from_points(points: list) -> IncidenceStructure:
    incidences = sum(len(p) for p in points)
    through: dict = {}
    for cid, pts in enumerate(points):
        for p in pts:
            through.setdefault(p, []).append(cid)

    # m1 >= 2 needs two curves sharing two points: collect shared points per curve pair
    shared: dict = {}
    for p, cids in through.items():
        if len(cids) >= 2:
            for pair in combinations(cids, 2):
                shared.setdefault(pair, []).append(p)
    m1, witness, wcurves = 0, None, ()
    for pts in shared.values():
        if len(pts) < 2:
            continue
        for p, q in combinations(sorted(pts), 2):
            cs = tuple(sorted(set(through[p]) & set(through[q])))
            if len(cs) > m1 or (len(cs) == m1 and (p, q) < witness):
                m1, witness, wcurves = len(cs), (p, q), cs
    if m1 == 0:
        for cid, pts in enumerate(points):
            if len(pts) >= 2 and (witness is None or (pts[0], pts[1]) < witness):
                m1, witness, wcurves = 1, (pts[0], pts[1]), (cid,)
        if witness is not None:
            wcurves = tuple(c for c, pts in enumerate(points) if witness[0] in pts and witness[1] in pts)

    edges: dict = {}
    for pts in points:
        for e in zip(pts, pts[1:]):
            edges[e] = edges.get(e, 0) + 1
    return IncidenceStructure(incidences, points, m1, witness, wcurves, max(edges.values(), default=0))


def incidence_structure(family: CurveFamily, method: str = "auto") -> IncidenceStructure:
    key = ("incidence", method)
    if key not in family.cache:
        if _use_reference(family, method):
            points = [curve_grid_points(c, family.X, family.Y) for c in family.curves]
        else:
            from .sweep import grid_points_fast

            points, lat = grid_points_fast(family)
        struct = _structure_from_points(points)
        if not _use_reference(family, method):
            struct.to_point = lambda p, lat=lat, d=family.delta: lat.point(p[0], p[1], d)
            if struct.witness is not None:
                struct.witness = tuple(struct.point(p) for p in struct.witness)
        family.cache[key] = struct
    return family.cache[key]


def count_incidences(family: CurveFamily, X: Optional[PointSet] = None, Y: Optional[PointSet] = None) -> int:
    """Point-curve pairs with the point on a closed segment of the curve."""
    if X is None and Y is None:
        return incidence_structure(family).incidences
    X = family.X if X is None else X
    Y = family.Y if Y is None else Y
    return sum(len(curve_grid_points(c, X, Y)) for c in family.curves)


def pair_multiplicity_m1(family: CurveFamily, method: str = "auto") -> tuple[int, Optional[tuple]]:
    s = incidence_structure(family, method)
    return s.m1, s.witness


def average_multiplicity_m2(family: CurveFamily, method: str = "auto", threads: int = 1) -> Fraction:
    ell = len(family)
    if ell < 2:
        raise ValueError("m2 needs at least two curves")
    return Fraction(pair_stats(family, method, threads).total, comb(ell, 2))


def drawing_crossings(family: CurveFamily, method: str = "auto", threads: int = 1) -> int:
    return pair_stats(family, method, threads).crossings
