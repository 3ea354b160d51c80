from fractions import Fraction
from math import floor

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import positive_rationals, rationals
from perturblab.scalar import (
    Enclosure,
    as_scalar,
    dyadic_index,
    format_scalar,
    grid_multiplier,
    iroot,
    log_enclosure,
    parse_scalar,
    power_enclosure,
    root_enclosure,
    round_to_grid,
)
from perturblab.verify import exp_bounds


@pytest.mark.parametrize(
    "t, delta, expected",
    [(0, 5, 0), (Fraction(73, 10), 1, 7), (Fraction(15, 2), 3, 9), (Fraction(-15, 2), 3, -6)],
)
def test_round_to_grid_examples(t, delta, expected):
    assert round_to_grid(t, delta) == expected


def test_round_to_grid_rejects_bad_spacing():
    with pytest.raises(ValueError):
        round_to_grid(1, 0)
    with pytest.raises(ValueError):
        round_to_grid(1, -2)


@given(rationals(), positive_rationals(100))
def test_round_to_grid_properties(t, delta):
    r = round_to_grid(t, delta)
    m = r / delta
    assert m.denominator == 1
    assert abs(r - t) <= delta / 2
    if abs(r - t) == delta / 2:
        assert r > t  # ties toward +inf
    assert round_to_grid(r, delta) == r  # idempotent
    assert grid_multiplier(t, delta) * delta == r


@given(rationals(), positive_rationals(100))
def test_round_to_grid_matches_naive_scan(t, delta):
    # nearest multiple by checking the two neighbours of t/delta
    lo = floor(t / delta) * delta
    hi = lo + delta
    expected = hi if hi - t <= t - lo else lo
    assert round_to_grid(t, delta) == expected


@pytest.mark.parametrize("t, k", [(1, 0), (Fraction(7, 2), 1), (Fraction(1, 3), -2), (2, 1), (Fraction(1, 2), -1)])
def test_dyadic_index_examples(t, k):
    assert dyadic_index(t) == k


def test_dyadic_index_rejects_non_positive():
    with pytest.raises(ValueError):
        dyadic_index(0)
    with pytest.raises(ValueError):
        dyadic_index(Fraction(-1, 3))


@given(positive_rationals(10 ** 6, 1000))
def test_dyadic_index_brackets_and_doubles(t):
    k = dyadic_index(t)
    assert Fraction(2) ** k <= t < Fraction(2) ** (k + 1)
    assert dyadic_index(2 * t) == k + 1


def test_scalar_text_form():
    assert format_scalar(Fraction(-6, 4)) == "-3/2"
    assert format_scalar(Fraction(8)) == "8"
    assert parse_scalar(" 10/4 ") == Fraction(5, 2)
    with pytest.raises(TypeError):
        as_scalar(0.5)


@given(st.integers(0, 10 ** 30), st.integers(1, 7))
def test_iroot_is_floor_root(n, k):
    r = iroot(n, k)
    assert r ** k <= n < (r + 1) ** k


def test_power_enclosure_examples():
    assert power_enclosure(16, Fraction(1, 2)) == Enclosure.exact(4)
    assert power_enclosure(5, 0) == Enclosure.exact(1)
    e = power_enclosure(2, Fraction(1, 2), bits=16)
    assert e.lo ** 2 <= 2 <= e.hi ** 2
    assert e.width <= Fraction(2, 2 ** 16)


@given(st.integers(1, 5000), st.integers(-12, 24), st.integers(1, 6), st.sampled_from([8, 16, 64, 128]))
def test_power_enclosure_brackets(base, p, q, bits):
    e = power_enclosure(base, Fraction(p, q), bits)
    exp = Fraction(p, q)
    assert e.lo <= e.hi
    target = Fraction(base) ** exp.numerator
    assert e.lo ** exp.denominator <= target <= e.hi ** exp.denominator
    assert e.width <= Fraction(1, 2 ** bits) * max(1, abs(e.hi))
    if exp.denominator == 1:
        assert e.is_exact


@given(positive_rationals(10 ** 6, 100), st.integers(2, 6))
def test_root_enclosure_brackets(v, k):
    e = root_enclosure(v, k)
    assert e.lo ** k <= v <= e.hi ** k
    assert e.width <= Fraction(1, 2 ** 64) * max(1, abs(e.hi))


@given(st.integers(1, 10 ** 4))
def test_log_enclosure_brackets(n):
    e = log_enclosure(n)
    if n == 1:
        assert e == Enclosure.exact(0)
        return
    assert 0 < e.lo <= e.hi
    assert exp_bounds(e.lo)[1] <= n <= exp_bounds(e.hi)[0]


def test_enclosure_arithmetic_contains_results():
    a = power_enclosure(2, Fraction(1, 2))
    b = power_enclosure(3, Fraction(1, 2))
    prod = a * b  # sqrt 6
    assert prod.lo ** 2 <= 6 <= prod.hi ** 2
    diff = b - a
    assert diff.lo <= b.hi - a.lo and diff.lo > 0
    q = Enclosure.exact(1) / a  # 1/sqrt 2
    assert q.lo ** 2 <= Fraction(1, 2) <= q.hi ** 2
    s = 1 + a
    assert s.lo == 1 + a.lo and s.hi == 1 + a.hi
    assert a.contains(a.lo) and not a.contains(a.hi + 1)
    assert a.to_json() == [format_scalar(a.lo), format_scalar(a.hi)]
