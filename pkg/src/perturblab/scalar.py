"""Exact scalars, grid rounding, dyadic indexing and rational enclosures.

Every real quantity in the lab is a :class:`fractions.Fraction`.  Irrational
thresholds such as ``n ** (1 - eps)`` or ``log n`` are carried as
:class:`Enclosure` objects: a pair of rationals guaranteed to bracket the
true value.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

from mpmath import iv
from mpmath.libmp import to_rational

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]

DEFAULT_BITS = 64

# mpmath's interval context keeps its precision in global state
_IV_LOCK = threading.Lock()


def as_scalar(value: ScalarLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: they would smuggle a binary rounding into an exact
    computation.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact scalars")
    if isinstance(value, (Fraction, int, str)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


def format_scalar(value: Fraction) -> str:
    """Canonical textual form ``p/q`` (integers drop the ``/q``)."""
    return str(Fraction(value))


def parse_scalar(text: str) -> Fraction:
    return Fraction(text.strip())


def round_to_grid(t: ScalarLike, delta: ScalarLike) -> Fraction:
    """Nearest multiple of ``delta``; exact half-way ties go toward +inf."""
    t = as_scalar(t)
    delta = as_scalar(delta)
    if delta <= 0:
        raise ValueError(f"grid spacing must be positive, got {delta}")
    return math.floor(t / delta + Fraction(1, 2)) * delta


def grid_multiplier(t: Fraction, delta: Fraction) -> int:
    """Integer ``m`` such that ``round_to_grid(t, delta) == m * delta``."""
    if delta <= 0:
        raise ValueError(f"grid spacing must be positive, got {delta}")
    return math.floor(t / delta + Fraction(1, 2))


def dyadic_index(t: ScalarLike) -> int:
    """The unique ``k`` with ``2**k <= t < 2**(k+1)``."""
    t = as_scalar(t)
    if t <= 0:
        raise ValueError(f"dyadic index needs t > 0, got {t}")
    k = t.numerator.bit_length() - t.denominator.bit_length()
    # the bit-length estimate is off by at most one
    if k >= 0:
        if t < (1 << k):
            k -= 1
    elif t < Fraction(1, 1 << -k):
        k -= 1
    return k


def iroot(n: int, k: int) -> int:
    """Floor of the real ``k``-th root of a non-negative integer."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if k < 1:
        raise ValueError("root order must be positive")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)  # 2**ceil(bits/k) >= true root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class Enclosure:
    """A closed rational interval ``[lo, hi]`` known to contain a real value."""

    lo: Fraction
    hi: Fraction
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: ScalarLike, bits: int = DEFAULT_BITS) -> "Enclosure":
        v = as_scalar(value)
        return cls(v, v, bits)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, value: ScalarLike) -> bool:
        v = as_scalar(value)
        return self.lo <= v <= self.hi

    def _coerce(self, other) -> "Enclosure":
        if isinstance(other, Enclosure):
            return other
        return Enclosure.exact(other, self.bits)

    def __add__(self, other):
        o = self._coerce(other)
        return Enclosure(self.lo + o.lo, self.hi + o.hi, min(self.bits, o.bits))

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo, self.bits)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        ends = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return Enclosure(min(ends), max(ends), min(self.bits, o.bits))

    __rmul__ = __mul__

    def reciprocal(self) -> "Enclosure":
        if self.lo <= 0 <= self.hi:
            raise ZeroDivisionError("enclosure straddles zero")
        return Enclosure(1 / self.hi, 1 / self.lo, self.bits)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def to_json(self) -> list[str]:
        return [format_scalar(self.lo), format_scalar(self.hi)]


def root_enclosure(value: ScalarLike, order: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclose the real ``order``-th root of a non-negative rational."""
    v = as_scalar(value)
    if v < 0:
        raise ValueError("root of a negative rational")
    if order < 1:
        raise ValueError("root order must be positive")
    if bits < 8:
        raise ValueError("need at least 8 bits of precision")
    if order == 1 or v == 0:
        return Enclosure.exact(v, bits)
    u, w = v.numerator, v.denominator
    # root(u/w) = root(u * w**(order-1)) / w
    big = u * w ** (order - 1)
    exact = iroot(big, order)
    if exact ** order == big:
        return Enclosure.exact(Fraction(exact, w), bits)
    scaled = iroot(big << (bits * order), order)
    unit = Fraction(1, w << bits)
    return Enclosure(scaled * unit, (scaled + 1) * unit, bits)


def power_enclosure(base: int, exponent: ScalarLike, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclose ``base ** exponent`` for a positive integer base.

    Exact whenever the power is rational (integer exponent, or a perfect
    power such as ``16 ** (1/2)``).
    """
    if isinstance(base, bool) or not isinstance(base, int) or base < 1:
        raise ValueError(f"base must be a positive integer, got {base!r}")
    if bits < 8:
        raise ValueError("need at least 8 bits of precision")
    e = as_scalar(exponent)
    p, q = e.numerator, e.denominator
    return root_enclosure(Fraction(base) ** p, q, bits)


def log_enclosure(n: int, bits: int = DEFAULT_BITS) -> Enclosure:
    """Enclose the natural logarithm of a positive integer.

    Backed by mpmath interval arithmetic (outward rounded); the endpoints
    are converted to exact rationals.
    """
    if n < 1:
        raise ValueError("log of a non-positive integer")
    if n == 1:
        return Enclosure.exact(0, bits)
    prec = bits + 16
    while True:
        with _IV_LOCK:
            saved = iv.prec
            iv.prec = prec
            try:
                r = iv.log(iv.mpf(n))
            finally:
                iv.prec = saved
        lo, hi = (Fraction(*to_rational(end)) for end in r._mpi_)
        if hi - lo <= Fraction(1, 1 << bits) * max(1, abs(hi)):
            return Enclosure(lo, hi, bits)
        prec *= 2
