"""Finite sets of exact rationals and their sum/product/k-fold combinations."""

from __future__ import annotations

import os
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .scalar import ScalarLike, as_scalar, format_scalar, parse_scalar, round_to_grid

DEFAULT_CAP = 10 ** 7
CAP_ENV = "PERTURBLAB_CAP"

# denominators of random rational points are drawn from this grid
RANDOM_GRID = 1 << 20


class ResourceCapError(RuntimeError):
    """An enumeration would exceed the configured tuple cap."""


def enumeration_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(CAP_ENV)
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class PointSet:
    """Strictly increasing tuple of exact rationals.

    Elements must be positive unless ``signed`` is set (difference sets such
    as ``kA - lA`` and a few textbook fixtures containing 0).
    """

    elements: tuple[Fraction, ...]
    signed: bool = False
    min_gap: Optional[Fraction] = field(init=False, compare=False)

    def __post_init__(self):
        elems = tuple(as_scalar(e) for e in self.elements)
        object.__setattr__(self, "elements", elems)
        gap = None
        for prev, cur in zip(elems, elems[1:]):
            d = cur - prev
            if d <= 0:
                raise ValueError("PointSet elements must be strictly increasing")
            if gap is None or d < gap:
                gap = d
        if elems and not self.signed and elems[0] <= 0:
            raise ValueError("PointSet elements must be positive")
        object.__setattr__(self, "min_gap", gap)

    @classmethod
    def of(cls, values: Iterable[ScalarLike], signed: bool = False) -> "PointSet":
        """Sort and deduplicate arbitrary values."""
        return cls(tuple(sorted({as_scalar(v) for v in values})), signed)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __contains__(self, value) -> bool:
        return value in self._lookup

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    def gaps(self) -> list[Fraction]:
        return [b - a for a, b in zip(self.elements, self.elements[1:])]

    def median_gap(self) -> Optional[Fraction]:
        g = self.gaps()
        return statistics.median(g) if g else None

    def is_separated(self, gap: ScalarLike = 1) -> bool:
        return self.min_gap is None or self.min_gap >= as_scalar(gap)

    def to_csv(self) -> str:
        lines = [f"# pointset v1 n={len(self)}"]
        lines.extend(format_scalar(e) for e in self.elements)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, signed: bool = False) -> "PointSet":
        rows = [ln.strip() for ln in text.splitlines()]
        if not rows or not rows[0].startswith("# pointset v1"):
            raise ValueError("missing '# pointset v1' header")
        declared = None
        for token in rows[0].split():
            if token.startswith("n="):
                declared = int(token[2:])
        values = [parse_scalar(r) for r in rows[1:] if r and not r.startswith("#")]
        out = cls(tuple(values), signed)
        if declared is not None and declared != len(out):
            raise ValueError(f"header declares n={declared}, found {len(out)} values")
        return out


def make_ap(x: ScalarLike, n: int) -> PointSet:
    """The progression ``{x+1, ..., x+n}``."""
    if n < 1:
        raise ValueError("make_ap needs n >= 1")
    x = as_scalar(x)
    return PointSet(tuple(x + j for j in range(1, n + 1)))


def make_gp(x: ScalarLike, n: int) -> PointSet:
    """The geometric progression ``x (1 + 1/x)**j`` for ``j = 0..n-1``."""
    x = as_scalar(x)
    if x <= 0:
        raise ValueError("make_gp needs x > 0")
    if n < 1:
        raise ValueError("make_gp needs n >= 1")
    ratio = 1 + 1 / x
    out, cur = [], x
    for _ in range(n):
        out.append(cur)
        cur *= ratio
    return PointSet(tuple(out))


def make_random_separated(
    n: int,
    lo: ScalarLike,
    hi: ScalarLike,
    min_gap: ScalarLike,
    seed: int,
    resolution: int = 1,
) -> PointSet:
    """``n`` random points in ``[lo, hi]`` with consecutive gaps ``>= min_gap``.

    Points are ``lo + i*min_gap + u_i`` where ``u`` is a sorted sample from
    ``[0, hi - lo - (n-1)*min_gap]``.  The sample lives on a grid of step
    ``1/resolution`` when that slack is integral (so integer inputs give
    integer points by default), else on ``RANDOM_GRID`` equal steps.  The
    generator is :class:`random.Random` seeded with ``seed``.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    lo, hi, min_gap = as_scalar(lo), as_scalar(hi), as_scalar(min_gap)
    if lo <= 0:
        raise ValueError("points must be positive: need lo > 0")
    if min_gap <= 0:
        raise ValueError("min_gap must be positive")
    slack = hi - lo - (n - 1) * min_gap
    if slack < 0:
        raise ValueError(f"cannot fit {n} points {min_gap} apart in [{lo}, {hi}]")
    rng = random.Random(seed)
    if slack.denominator == 1:
        steps = int(slack) * resolution
        unit = Fraction(1, resolution)
    else:
        steps = RANDOM_GRID
        unit = slack / RANDOM_GRID
    offsets = sorted(rng.randint(0, steps) for _ in range(n))
    return PointSet(tuple(lo + i * min_gap + u * unit for i, u in enumerate(offsets)))


def sumset(A: PointSet, B: PointSet) -> PointSet:
    return PointSet.of((a + b for a in A for b in B), signed=A.signed or B.signed)


def productset(A: PointSet, B: PointSet, delta: Optional[ScalarLike] = None) -> PointSet:
    """``{a*b}``; with ``delta`` each product is first rounded to the Δ-grid."""
    prods = (a * b for a in A for b in B)
    signed = A.signed or B.signed
    if delta is None:
        return PointSet.of(prods, signed=signed)
    return PointSet.of((round_to_grid(p, delta) for p in prods), signed=True)


def enforce_separation(A: PointSet) -> PointSet:
    """Greedy left-to-right thinning to a 1-separated subset.

    Keeps an element iff it is at least 1 above the last kept one.  When the
    median gap of ``A`` is at least 1 this keeps at least half the points.
    """
    kept: list[Fraction] = []
    for a in A:
        if not kept or a - kept[-1] >= 1:
            kept.append(a)
    return PointSet(tuple(kept), A.signed)


def k_fold_span(A: PointSet, k: int, l: int, cap: Optional[int] = None) -> PointSet:
    """``kA - lA``: all sums of ``k`` elements minus sums of ``l`` elements.

    The cap bounds ``|A|**(k+l)``, the size of the naive enumeration; the
    set itself is built by iterated sumsets which is far cheaper.
    """
    if k < 0 or l < 0 or k + l < 1:
        raise ValueError("need k, l >= 0 and k + l >= 1")
    limit = enumeration_cap(cap)
    if len(A) ** (k + l) > limit:
        raise ResourceCapError(f"|A|^(k+l) = {len(A) ** (k + l)} exceeds cap {limit}")
    acc = {Fraction(0)}
    for _ in range(k):
        acc = {s + a for s in acc for a in A}
    for _ in range(l):
        acc = {s - a for s in acc for a in A}
    return PointSet.of(acc, signed=True)
