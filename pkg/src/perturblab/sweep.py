"""Vectorised exact engine for full curve families.

Everything is moved to an integer lattice first: x-coordinates are scaled by
the common denominator ``R`` of ``B`` and heights are replaced by their grid
multipliers ``m`` (height ``= m * delta``).  Both maps are increasing and
affine, so orderings, collinearity and crossings are unchanged.

Curve ``(i, j)`` is the polyline ``P_i`` (vertices ``(B[k], M[i, k])``)
shifted right by ``B[j]``.  Both polylines of a pair stay within
``delta / 2`` of their lines, so contacts can only occur where the lines are
within ``delta`` of each other.  For slopes ``a < c`` that is an x-window of
width ``2 delta / (c - a)``; when the window holds no vertex of either curve
the pair is decided by one sign comparison, otherwise the reference merge
walk runs on the window.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .incidence import Contact, CurveFamily, GridPoint, PairStats, walk_contacts
from .scalar import grid_multiplier

INT64_SAFE = 1 << 62


@dataclass
class Lattice:
    n: int
    scale: int
    b: list  # scaled B, python ints
    barr: np.ndarray
    mult: list  # mult[i][k] = grid multiplier of B[i] * B[k]
    marr: np.ndarray
    xset: frozenset
    xarr: np.ndarray
    mset: frozenset
    marr_sorted: np.ndarray
    dceil: int  # ceil(R**2 * delta), conservative window half-height
    dtype: object  # np.int64 when products provably fit, else object

    @classmethod
    def from_family(cls, family: CurveFamily) -> "Lattice":
        B, delta = family.B, family.delta
        n = len(B)
        scale = math.lcm(*(e.denominator for e in B))
        b = [int(e * scale) for e in B]
        mult = [[grid_multiplier(B[i] * B[k], delta) for k in range(n)] for i in range(n)]
        xs = sorted({u + v for u in b for v in b})
        ms = sorted({m for row in mult for m in row})
        dceil = math.ceil(delta * scale * scale)

        mmax = max(abs(m) for m in ms)
        gap = max((v - u for u, v in zip(b, b[1:])), default=1)
        dm = max((abs(r[k + 1] - r[k]) for r in mult for k in range(n - 1)), default=0)
        xmax = 2 * max(abs(v) for v in b)
        worst = 4 * (mmax * gap * gap + dm * gap * xmax + max(b) ** 2 + dceil)
        big = worst >= INT64_SAFE or dceil >= INT64_SAFE
        dtype = object if big else np.int64

        def arr(values):
            return np.array(values, dtype=dtype)

        return cls(
            n, scale, b, arr(b), mult, np.array(mult, dtype=dtype),
            frozenset(xs), arr(xs), frozenset(ms), arr(ms), dceil, dtype,
        )

    def curve(self, i: int, j: int):
        xs = [self.b[j] + v for v in self.b]
        return xs, self.mult[i]

    def is_grid(self, x, m) -> bool:
        return (
            x.denominator == 1 and m.denominator == 1
            and int(x) in self.xset and int(m) in self.mset
        )

    def point(self, x: int, m: int, delta: Fraction) -> GridPoint:
        return GridPoint(Fraction(x, self.scale), m * delta)

    def to_real(self, c: Contact, delta: Fraction) -> Contact:
        return Contact(Fraction(c.x) / self.scale, Fraction(c.y) * delta, c.kind)


def _slope_pairs(lat: Lattice, i: int, record: bool):
    """All pairs whose first curve has slope index ``i`` (second slope >= i)."""
    n = lat.n
    b = lat.barr
    J = np.repeat(np.arange(n), n)
    J2 = np.tile(np.arange(n), n)
    bj, dj = b[J], b[J2]
    L = np.maximum(bj, dj) + b[0]
    U = np.minimum(bj, dj) + b[-1]
    a = lat.b[i]

    total = crossings = best = 0
    multi = {}
    recs = [] if record else None

    def slow(i2, j, j2, lo=None, hi=None):
        nonlocal total, crossings, best
        xs1, ys1 = lat.curve(i, j)
        xs2, ys2 = lat.curve(i2, j2)
        cs = walk_contacts(xs1, ys1, xs2, ys2, lo, hi)
        if not cs:
            return
        total += len(cs)
        best = max(best, len(cs))
        on_grid = [lat.is_grid(c.x, c.y) for c in cs]
        crossings += on_grid.count(False)
        id1, id2 = i * n + j, i2 * n + j2
        if len(cs) >= 2:
            multi[(id1, id2)] = tuple(cs)
        if record:
            recs.extend((id1, id2, c) for c in cs)

    # same slope: parallel lines a*|b - d| apart
    for j in range(n):
        for j2 in range(j + 1, n):
            if a * abs(lat.b[j] - lat.b[j2]) <= lat.dceil:
                slow(i, j, j2)

    for i2 in range(i + 1, n):
        c = lat.b[i2]
        s = c - a
        K = c * dj - a * bj
        w0 = (K - lat.dceil) // s - 1
        w1 = -((-(K + lat.dceil)) // s) + 1
        cand = np.nonzero((L <= U) & (w0 < U) & (w1 > L))[0]
        if not len(cand):
            continue
        cj, cj2 = J[cand], J2[cand]
        cb, cd = bj[cand], dj[cand]
        cw0, cw1 = w0[cand], w1[cand]
        cL, cU = L[cand], U[cand]

        # first vertex at or right of w0 on each curve; the pair is "simple"
        # when that vertex is already beyond w1 for both curves
        idx1 = np.searchsorted(b, cw0 - cb, side="left")
        idx2 = np.searchsorted(b, cw0 - cd, side="left")
        inside = (cL < cw0) & (cw1 < cU)
        safe1 = np.minimum(idx1, n - 1)
        safe2 = np.minimum(idx2, n - 1)
        simple = inside & (b[safe1] > cw1 - cb) & (b[safe2] > cw1 - cd)

        for t in np.nonzero(~simple)[0]:
            slow(i2, int(cj[t]), int(cj2[t]), int(cw0[t]), int(cw1[t]))

        sel = np.nonzero(simple)[0]
        if not len(sel):
            continue
        k1 = idx1[sel] - 1
        k2 = idx2[sel] - 1
        x1 = cb[sel] + b[k1]
        x2 = cd[sel] + b[k2]
        g1 = b[k1 + 1] - b[k1]
        g2 = b[k2 + 1] - b[k2]
        row1, row2 = lat.marr[i], lat.marr[i2]
        m1 = row1[k1]
        m2 = row2[k2]
        dm1 = row1[k1 + 1] - m1
        dm2 = row2[k2 + 1] - m2
        base = (m1 - m2) * g1 * g2
        u0, u1 = cw0[sel], cw1[sel]
        h0 = base + dm1 * g2 * (u0 - x1) - dm2 * g1 * (u0 - x2)
        h1 = base + dm1 * g2 * (u1 - x1) - dm2 * g1 * (u1 - x2)
        hit = np.nonzero((h0 > 0) != (h1 > 0))[0]
        if not len(hit):
            continue
        total += len(hit)
        best = max(best, 1)
        # crossing abscissa num/den of the two segment lines
        den = (dm1 * g2 - dm2 * g1)[hit]
        num = (-base + dm1 * g2 * x1 - dm2 * g1 * x2)[hit]
        integral = np.nonzero(num % den == 0)[0]
        on_grid = np.zeros(len(hit), dtype=bool)
        for t in integral:
            h = hit[t]
            x = int(num[t] // den[t])
            y = int(m1[h]) + Fraction(int(dm1[h]) * (x - int(x1[h])), int(g1[h]))
            on_grid[t] = lat.is_grid(Fraction(x), y)
        crossings += int(len(hit) - on_grid.sum())
        if record:
            ids1 = i * n + cj[sel][hit]
            ids2 = i2 * n + cj2[sel][hit]
            for t in range(len(hit)):
                h = hit[t]
                x = Fraction(int(num[t]), int(den[t]))
                y = int(m1[h]) + Fraction(int(dm1[h]), int(g1[h])) * (x - int(x1[h]))
                recs.append((int(ids1[t]), int(ids2[t]), Contact(x, y, "crossing")))
    return total, crossings, best, multi, recs


def _run_chunk(args):
    lat, slopes, record = args
    return [_slope_pairs(lat, i, record) for i in slopes]


def sweep_pairs(family: CurveFamily, threads: int = 1, record: bool = False) -> PairStats:
    """Exact pair statistics for a full family ``{(a, b) : a, b in B}``."""
    lat = Lattice.from_family(family)
    n = lat.n
    slopes = list(range(n))
    if threads > 1 and n > 1:
        chunks = [slopes[k::threads] for k in range(threads)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, [(lat, c, record) for c in chunks]))
        by_slope = {}
        for chunk, res in zip(chunks, parts):
            by_slope.update(zip(chunk, res))
        results = [by_slope[i] for i in slopes]
    else:
        results = [_slope_pairs(lat, i, record) for i in slopes]

    total = crossings = best = 0
    multi, recs = {}, [] if record else None
    for t, c, bst, mlt, rc in results:
        total += t
        crossings += c
        best = max(best, bst)
        multi.update(mlt)
        if record:
            recs.extend(rc)
    delta = family.delta
    multi = {k: tuple(lat.to_real(c, delta) for c in v) for k, v in multi.items()}
    if record:
        recs = [(u, v, lat.to_real(c, delta)) for u, v, c in recs]
    return PairStats(comb(n * n, 2), total, crossings, best, multi, recs)


def grid_points_fast(family: CurveFamily) -> tuple[list, Lattice]:
    """Per curve, its grid points as ``(scaled x, multiplier)`` int tuples.

    Vertices come for free; pass-through points are found by testing every
    grid abscissa strictly inside each segment.
    """
    lat = Lattice.from_family(family)
    n = lat.n
    b, xarr = lat.barr, lat.xarr
    out = []
    for i in range(n):
        row = lat.marr[i]
        extra: dict = {}
        if n >= 2:
            # segments (j, k): from b[j]+b[k] to b[j]+b[k+1]
            sj = np.repeat(np.arange(n), n - 1)
            sk = np.tile(np.arange(n - 1), n)
            x0 = b[sj] + b[sk]
            x1 = b[sj] + b[sk + 1]
            lo = np.searchsorted(xarr, x0, side="right")
            hi = np.searchsorted(xarr, x1, side="left")
            cnt = hi - lo
            tot = int(cnt.sum())
            if tot:
                seg = np.repeat(np.arange(len(cnt)), cnt)
                start = np.repeat(lo - np.cumsum(cnt) + cnt, cnt)
                pos = start + np.arange(tot)
                xs = xarr[pos]
                k = sk[seg]
                g = b[k + 1] - b[k]
                dm = row[k + 1] - row[k]
                off = dm * (xs - x0[seg])
                ok = np.nonzero(off % g == 0)[0]
                if len(ok):
                    ms = row[k[ok]] + off[ok] // g[ok]
                    on = np.isin(ms, lat.marr_sorted) if lat.dtype is np.int64 else np.array(
                        [int(m) in lat.mset for m in ms], dtype=bool
                    )
                    for t in np.nonzero(on)[0]:
                        s = int(seg[ok[t]])
                        extra.setdefault(int(sj[s]), []).append((int(xs[ok[t]]), int(ms[t])))
        for j in range(n):
            pts = [(lat.b[j] + lat.b[k], lat.mult[i][k]) for k in range(n)]
            if j in extra:
                pts = sorted(pts + extra[j])
            out.append(pts)
    return out, lat
