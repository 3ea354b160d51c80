import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from perturblab.scalar import log_enclosure, power_enclosure
from perturblab.sets import PointSet, ResourceCapError, make_ap, sumset
from perturblab.structure import (
    decompose_dyadic,
    distinct_ksums_check,
    dyadic_lemma_report,
    extract_doubling_chain,
    is_doubling_chain,
    plunnecke_check,
)
from perturblab.verify import random_doubling_chain

positive_sets = st.lists(
    st.builds(Fraction, st.integers(1, 5000), st.integers(1, 8)), min_size=1, max_size=12, unique=True
).map(PointSet.of)


def F(*xs):
    return tuple(Fraction(x) for x in xs)


def test_decompose_example():
    A = PointSet(F(1, 2, 3, 5, 9, 17))
    dec = decompose_dyadic(A)
    assert {k: v.elements for k, v in dec.buckets.items()} == {
        0: F(1), 1: F(2, 3), 2: F(5), 3: F(9), 4: F(17)
    }
    assert dec.best_index == 1
    assert decompose_dyadic(make_ap(1023, 16)).occupied() == [10]


def test_decompose_ties_go_to_smallest_index():
    dec = decompose_dyadic(PointSet(F(1, Fraction(3, 2), 4, 5)))
    assert dec.best_index == 0


@given(positive_sets)
def test_decompose_partitions(A):
    dec = decompose_dyadic(A)
    assert sorted(e for b in dec.buckets.values() for e in b) == list(A)
    for k, b in dec.buckets.items():
        assert all(Fraction(2) ** k <= e < Fraction(2) ** (k + 1) for e in b)
    assert len(dec.best) == max(len(b) for b in dec.buckets.values())


def test_extract_doubling_chain_examples():
    assert extract_doubling_chain(PointSet(F(1, 2, 3, 5, 9, 17))).elements == F(1, 5, 17)
    assert len(extract_doubling_chain(make_ap(1023, 16))) == 1


@given(positive_sets)
def test_extracted_chain_properties(A):
    chain = extract_doubling_chain(A)
    occupied = len(decompose_dyadic(A).buckets)
    assert is_doubling_chain(chain)
    assert len(chain) >= (occupied + 1) // 2
    assert set(chain) <= set(A)


def test_distinct_ksums_examples():
    chain = PointSet(F(1, 2, 4, 8))
    rep = distinct_ksums_check(chain, 2)
    assert rep.distinct and rep.subsets == 6
    assert {a + b for a, b in combinations(chain, 2)} == set(F(3, 5, 9, 6, 10, 12))
    assert distinct_ksums_check(chain, 1).distinct
    with pytest.raises(ValueError):
        distinct_ksums_check(PointSet(F(1, 3, 5)), 2)
    with pytest.raises(ResourceCapError):
        distinct_ksums_check(PointSet(tuple(Fraction(2) ** i for i in range(30))), 10, cap=1000)


@given(st.integers(0, 2 ** 32), st.integers(1, 12), st.integers(0, 12))
def test_chains_have_distinct_ksums(seed, length, k):
    chain = random_doubling_chain(random.Random(seed), length)
    k = min(k, length)
    rep = distinct_ksums_check(chain, k)
    sums = [sum(s) for s in combinations(chain, k)]
    assert rep.distinct and len(set(sums)) == len(sums)


def test_plunnecke_example():
    rep = plunnecke_check(PointSet(F(0, 1), signed=True), 2, 1)
    assert rep.doubling == Fraction(3, 2)
    assert rep.span_size == 4 and rep.bound == Fraction(27, 4) and rep.holds


@given(positive_sets.filter(lambda A: len(A) <= 6), st.integers(0, 3), st.integers(0, 3))
def test_plunnecke_holds_and_matches_brute_force(A, k, l):
    if k + l == 0:
        return
    rep = plunnecke_check(A, k, l)
    naive = {sum(p) - sum(q) for p in product(A, repeat=k) for q in product(A, repeat=l)}
    assert rep.span_size == len(naive)
    assert rep.doubling == Fraction(len(sumset(A, A)), len(A))
    assert rep.holds
    if k + l < 4:
        assert plunnecke_check(A, k + 1, l).span_size >= rep.span_size
        assert plunnecke_check(A, k, l + 1).span_size >= rep.span_size


def test_dyadic_lemma_on_powers_of_two():
    A = PointSet(tuple(Fraction(2) ** i for i in range(8)))
    rep = dyadic_lemma_report(A, Fraction(1, 2))
    assert rep.sumset_size == 36 and rep.best_bucket == 1
    # 8**1.5 / (3 ln 8) is about 3.63
    assert Fraction(362, 100) < rep.threshold.lo <= rep.threshold.hi < Fraction(364, 100)
    assert not rep.hypothesis_holds and not rep.conclusion_holds and rep.implication_holds
    assert rep.vacuous


def test_dyadic_lemma_on_progression():
    rep = dyadic_lemma_report(make_ap(64, 32), Fraction(1, 4))
    assert rep.best_bucket == 32 and rep.conclusion_holds and rep.implication_holds
    data = rep.to_json()
    assert set(data) == {
        "n", "delta", "sumset_size", "threshold_lo", "threshold_hi", "best_bucket",
        "conclusion_bound_lo", "conclusion_bound_hi", "hypothesis_holds", "conclusion_holds",
    }


def test_dyadic_lemma_threshold_enclosure():
    rep = dyadic_lemma_report(make_ap(100, 16), Fraction(1, 4))
    num = power_enclosure(16, Fraction(5, 4))
    den = 3 * log_enclosure(16)
    assert rep.threshold.lo <= num.hi / den.lo and rep.threshold.hi >= num.lo / den.hi
    assert rep.threshold.lo * den.lo <= num.hi
    with pytest.raises(ValueError):
        dyadic_lemma_report(make_ap(1, 4), 1)
    with pytest.raises(ValueError):
        dyadic_lemma_report(PointSet(F(3)), Fraction(1, 2))


def test_dyadic_lemma_hypothesis_can_hold():
    # |A+A| = 2n-1 sits below n^(1+d)/(3 ln n) once n^d > 6 ln n
    A = make_ap(2 ** 12, 128)
    rep = dyadic_lemma_report(A, Fraction(3, 4))
    assert rep.hypothesis_holds and rep.conclusion_holds
