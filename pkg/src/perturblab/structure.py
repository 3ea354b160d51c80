"""Dyadic pigeonholing, doubling chains and Plünnecke-Ruzsa checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Optional

from .scalar import (
    DEFAULT_BITS,
    Enclosure,
    ScalarLike,
    as_scalar,
    dyadic_index,
    format_scalar,
    log_enclosure,
    power_enclosure,
)
from .sets import PointSet, ResourceCapError, enumeration_cap, k_fold_span, sumset


@dataclass(frozen=True)
class DyadicDecomposition:
    buckets: dict  # dyadic index -> PointSet
    best_index: int

    @property
    def best(self) -> PointSet:
        return self.buckets[self.best_index]

    def occupied(self) -> list[int]:
        return sorted(self.buckets)


def decompose_dyadic(A: PointSet) -> DyadicDecomposition:
    """Split ``A`` by ``[2**k, 2**(k+1))``; the fullest bucket wins, ties to the smallest k."""
    if not len(A):
        raise ValueError("cannot decompose an empty set")
    groups: dict[int, list[Fraction]] = {}
    for a in A:
        groups.setdefault(dyadic_index(a), []).append(a)
    buckets = {k: PointSet(tuple(v)) for k, v in sorted(groups.items())}
    best = min(buckets, key=lambda k: (-len(buckets[k]), k))
    return DyadicDecomposition(buckets, best)


def extract_doubling_chain(A: PointSet) -> PointSet:
    """Smallest element of every second occupied dyadic bucket.

    Buckets two places apart in the occupied list have indices at least 2
    apart, so consecutive chain elements have ratio at least 2.
    """
    if not len(A):
        return A
    dec = decompose_dyadic(A)
    occupied = dec.occupied()
    return PointSet(tuple(dec.buckets[k][0] for k in occupied[::2]))


def is_doubling_chain(chain: PointSet) -> bool:
    return all(b >= 2 * a for a, b in zip(chain, chain[1:]))


@dataclass(frozen=True)
class KSumReport:
    k: int
    subsets: int
    distinct: bool
    witness: Optional[tuple] = None  # two k-subsets with equal sums


def distinct_ksums_check(chain: PointSet, k: int, cap: Optional[int] = None) -> KSumReport:
    """Enumerate all k-subsets of a doubling chain and confirm distinct sums."""
    if not is_doubling_chain(chain):
        raise ValueError("chain must have consecutive ratios >= 2")
    if k < 0 or k > len(chain):
        raise ValueError(f"k must lie in [0, {len(chain)}]")
    total = comb(len(chain), k)
    limit = enumeration_cap(cap)
    if total > limit:
        raise ResourceCapError(f"C({len(chain)}, {k}) = {total} exceeds cap {limit}")
    seen: dict[Fraction, tuple] = {}
    for subset in combinations(chain, k):
        s = sum(subset, Fraction(0))
        if s in seen:
            return KSumReport(k, total, False, (seen[s], subset))
        seen[s] = subset
    return KSumReport(k, total, True)


@dataclass(frozen=True)
class PlunneckeReport:
    k: int
    l: int
    size: int
    doubling: Fraction  # K = |A+A| / |A|
    span_size: int  # |kA - lA|
    bound: Fraction  # K**(k+l) * |A|

    @property
    def holds(self) -> bool:
        return self.span_size <= self.bound


def plunnecke_check(A: PointSet, k: int, l: int, cap: Optional[int] = None) -> PlunneckeReport:
    n = len(A)
    if n == 0:
        raise ValueError("empty set")
    K = Fraction(len(sumset(A, A)), n)
    span = k_fold_span(A, k, l, cap)
    return PlunneckeReport(k, l, n, K, len(span), K ** (k + l) * n)


@dataclass(frozen=True)
class DyadicLemmaReport:
    n: int
    delta: Fraction
    sumset_size: int
    threshold: Enclosure  # n**(1+delta) / (3 ln n)
    best_bucket: int
    conclusion_bound: Enclosure  # n**(1-delta)

    @property
    def hypothesis_holds(self) -> bool:
        # outward: a sumset that might sit under the threshold counts as under it
        return self.sumset_size <= self.threshold.hi

    @property
    def conclusion_holds(self) -> bool:
        # outward: the bucket must clear every value the enclosure allows
        return self.best_bucket >= self.conclusion_bound.hi

    @property
    def vacuous(self) -> bool:
        return not self.hypothesis_holds

    @property
    def implication_holds(self) -> bool:
        return not self.hypothesis_holds or self.conclusion_holds

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "delta": format_scalar(self.delta),
            "sumset_size": self.sumset_size,
            "threshold_lo": format_scalar(self.threshold.lo),
            "threshold_hi": format_scalar(self.threshold.hi),
            "best_bucket": self.best_bucket,
            "conclusion_bound_lo": format_scalar(self.conclusion_bound.lo),
            "conclusion_bound_hi": format_scalar(self.conclusion_bound.hi),
            "hypothesis_holds": self.hypothesis_holds,
            "conclusion_holds": self.conclusion_holds,
        }


def dyadic_lemma_report(A: PointSet, delta: ScalarLike, bits: int = DEFAULT_BITS) -> DyadicLemmaReport:
    """Evaluate both sides of the dyadic-interval lemma on one set.

    Hypothesis: ``|A+A| <= n**(1+delta) / (3 ln n)``.  Conclusion: some
    dyadic bucket holds at least ``n**(1-delta)`` elements.
    """
    delta = as_scalar(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    n = len(A)
    if n < 2:
        raise ValueError("the lemma needs n >= 2 (log n vanishes at n = 1)")
    threshold = power_enclosure(n, 1 + delta, bits) / (3 * log_enclosure(n, bits))
    return DyadicLemmaReport(
        n=n,
        delta=delta,
        sumset_size=len(sumset(A, A)),
        threshold=threshold,
        best_bucket=len(decompose_dyadic(A).best),
        conclusion_bound=power_enclosure(n, 1 - delta, bits),
    )
