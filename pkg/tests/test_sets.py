from fractions import Fraction
from itertools import combinations, product
from math import ceil, e

import pytest
from hypothesis import given
from hypothesis import strategies as st

from perturblab.sets import (
    CAP_ENV,
    PointSet,
    ResourceCapError,
    enforce_separation,
    k_fold_span,
    make_ap,
    make_gp,
    make_random_separated,
    productset,
    sumset,
)

small_sets = st.lists(
    st.builds(Fraction, st.integers(1, 400), st.integers(1, 4)), min_size=1, max_size=8, unique=True
).map(PointSet.of)


def F(*xs):
    return tuple(Fraction(x) for x in xs)


def test_pointset_invariants():
    A = PointSet.of([3, 1, 2, 2])
    assert A.elements == F(1, 2, 3) and A.min_gap == 1
    assert PointSet(F(5)).min_gap is None
    with pytest.raises(ValueError):
        PointSet(F(2, 1))
    with pytest.raises(ValueError):
        PointSet(F(0, 1))
    assert PointSet(F(0, 1), signed=True).elements == F(0, 1)


def test_csv_round_trip_and_header():
    A = PointSet(F(1, Fraction(5, 2), 4))
    text = A.to_csv()
    assert text.splitlines()[0] == "# pointset v1 n=3"
    assert text.splitlines()[2] == "5/2"
    assert PointSet.from_csv(text) == A
    with pytest.raises(ValueError):
        PointSet.from_csv("1\n2\n")
    with pytest.raises(ValueError):
        PointSet.from_csv("# pointset v1 n=4\n1\n2\n")


def test_make_ap_examples():
    assert make_ap(0, 3).elements == F(1, 2, 3)
    A = make_ap(4096, 16)
    assert A.elements == tuple(Fraction(v) for v in range(4097, 4113)) and A.min_gap == 1
    assert len(sumset(A, A)) == 31
    with pytest.raises(ValueError):
        make_ap(1, 0)


def test_make_gp_examples():
    assert make_gp(4, 3).elements == F(4, 5, Fraction(25, 4))
    assert make_gp(1, 2).elements == F(1, 2)


@given(st.integers(1, 40), st.integers(0, 39), st.integers(1, 5))
def test_make_gp_near_progression(x, n, den):
    x = Fraction(x * den + 1, den)
    n = min(n, int(x)) or 1
    G = make_gp(x, n)
    for j, g in enumerate(G):
        assert abs(g - (x + j)) <= Fraction(j * j) / x
        assert x <= g < x * Fraction(e)  # n <= x keeps the progression below e*x
    assert list(G) == sorted(set(G))


def test_make_random_separated_examples():
    assert make_random_separated(1, 5, 5, 1, 0).elements == F(5)
    with pytest.raises(ValueError):
        make_random_separated(3, 0, 2, 1, 0)
    with pytest.raises(ValueError):
        make_random_separated(4, 1, 3, 1, 0)


@given(st.integers(1, 30), st.integers(0, 100), st.integers(0, 2 ** 32))
def test_make_random_separated_properties(n, slack, seed):
    lo, gap = Fraction(7, 3), Fraction(3, 2)
    hi = lo + (n - 1) * gap + Fraction(slack, 7)
    A = make_random_separated(n, lo, hi, gap, seed)
    assert len(A) == n and A[0] >= lo and A[-1] <= hi
    assert A.is_separated(gap)
    assert A == make_random_separated(n, lo, hi, gap, seed)


def test_sumset_examples():
    assert sumset(PointSet(F(1, 2, 3)), PointSet(F(1, 2, 3))).elements == F(2, 3, 4, 5, 6)
    assert sumset(PointSet(F(1, 2, 4)), PointSet(F(1, 2, 4))).elements == F(2, 3, 4, 5, 6, 8)
    S = PointSet(F(1, 2, 5, 11))  # Sidon: all pairwise sums distinct
    T = PointSet(F(100, 300))
    assert len(sumset(S, T)) == len(S) * len(T)


def test_productset_examples():
    A = PointSet(F(1, 2, 4))
    assert productset(A, A).elements == F(1, 2, 4, 8, 16)
    B = PointSet(F(3, Fraction(7, 2), 9))
    assert productset(PointSet(F(1)), B) == B
    assert len(productset(A, A, delta=1000)) == 1


@given(small_sets, small_sets)
def test_sum_and_product_match_double_loop(A, B):
    assert set(sumset(A, B)) == {a + b for a in A for b in B}
    assert set(productset(A, B)) == {a * b for a in A for b in B}
    assert len(sumset(A, B)) <= len(A) * len(B)
    n = len(A)
    assert 2 * n - 1 <= len(sumset(A, A)) <= n * (n + 1) // 2


def test_enforce_separation_examples():
    A = PointSet(F(1, Fraction(6, 5), 3, Fraction(9, 2)))
    assert enforce_separation(A).elements == F(1, 3, Fraction(9, 2))
    B = make_ap(10, 6)
    assert enforce_separation(B) == B


def _largest_separated(A):
    for size in range(len(A), 0, -1):
        for sub in combinations(A, size):
            if all(v - u >= 1 for u, v in zip(sub, sub[1:])):
                return size
    return 0


@given(small_sets)
def test_enforce_separation_against_exhaustive_oracle(A):
    kept = enforce_separation(A)
    assert kept.is_separated(1)
    assert set(kept) <= set(A)
    # greedy left-to-right is optimal for 1-separated subsets
    assert len(kept) == _largest_separated(A)
    med = A.median_gap()
    if med is not None and med >= 1:
        assert len(kept) >= ceil(len(A) / 2)


def test_k_fold_span_examples():
    A = PointSet(F(0, 1), signed=True)
    assert k_fold_span(A, 2, 1).elements == F(-1, 0, 1, 2)
    B = PointSet(F(2, 3, 7))
    assert set(k_fold_span(B, 1, 0)) == set(B)
    with pytest.raises(ValueError):
        k_fold_span(B, 0, 0)


@given(small_sets.filter(lambda A: len(A) <= 5), st.integers(0, 3), st.integers(0, 3))
def test_k_fold_span_brute_force(A, k, l):
    if k + l == 0:
        return
    naive = {sum(p) - sum(q) for p in product(A, repeat=k) for q in product(A, repeat=l)}
    span = k_fold_span(A, k, l)
    assert set(span) == naive
    assert len(span) >= len(A)


def test_k_fold_span_cap(monkeypatch):
    A = make_ap(0, 10)
    with pytest.raises(ResourceCapError):
        k_fold_span(A, 2, 2, cap=9999)
    assert len(k_fold_span(A, 2, 2, cap=10000)) > 0
    monkeypatch.setenv(CAP_ENV, "50")
    with pytest.raises(ResourceCapError):
        k_fold_span(A, 1, 1)
