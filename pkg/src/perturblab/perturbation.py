"""Perturbation budgets, perturbed product/sum sets and collapse adversaries."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .scalar import (
    DEFAULT_BITS,
    Enclosure,
    ScalarLike,
    as_scalar,
    format_scalar,
    parse_scalar,
    power_enclosure,
    round_to_grid,
)
from .sets import PointSet, productset, sumset

# random deltas are drawn from this many steps on each side of zero
DELTA_GRID = 1 << 16


class DomainError(ValueError):
    """A perturbed factor left the positive reals."""


class Deltas(NamedTuple):
    delta: Fraction
    delta_prime: Fraction
    delta_sum: Fraction


ZERO = Deltas(Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class PerturbationBudget:
    """Open bounds ``|delta_{a,b}| < n**(1-eps) / a``.

    ``n**(1-eps)`` is usually irrational; the budget uses the lower end of
    its enclosure, so any delta strictly inside the certified bound also
    satisfies the true inequality.  ``scale`` replaces that numerator for
    deliberately widened (or narrowed) what-if budgets.
    """

    n: int
    epsilon: Fraction
    bits: int = DEFAULT_BITS
    scale: Optional[Fraction] = None
    bound_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        eps = as_scalar(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {eps}")
        if self.n < 1:
            raise ValueError("budget needs n >= 1")
        if self.scale is not None:
            object.__setattr__(self, "scale", as_scalar(self.scale))

    @classmethod
    def widened(cls, n: int, scale: ScalarLike, epsilon: ScalarLike = 1) -> "PerturbationBudget":
        return cls(n, as_scalar(epsilon), scale=as_scalar(scale))

    @property
    def numerator_enclosure(self) -> Enclosure:
        """Enclosure of ``n**(1-eps)`` (exact when ``scale`` overrides it)."""
        if self.scale is not None:
            return Enclosure.exact(self.scale, self.bits)
        return power_enclosure(self.n, 1 - self.epsilon, self.bits)

    @property
    def numerator(self) -> Fraction:
        cached = self.bound_cache.get(None)
        if cached is None:
            cached = self.numerator_enclosure.lo
            self.bound_cache[None] = cached
        return cached

    def bound(self, a: Fraction) -> Fraction:
        """Certified bound on ``|delta|`` for factor ``a``."""
        b = self.bound_cache.get(a)
        if b is None:
            b = self.numerator / a
            self.bound_cache[a] = b
        return b

    def sum_bound(self, a: Fraction, b: Fraction) -> Fraction:
        return self.numerator / (a + b)

    def product_interval(self, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
        """Exact hull of ``(a+d)(b+d')`` over the closed budget box (factors > 0)."""
        ba, bb = self.bound(a), self.bound(b)
        return (a - ba) * (b - bb), (a + ba) * (b + bb)


@dataclass(frozen=True)
class PerturbationAssignment:
    """Per ordered pair ``(a, b)`` the triple ``(delta, delta', delta'')``."""

    entries: dict

    def __getitem__(self, pair) -> Deltas:
        return self.entries[pair]

    def __len__(self) -> int:
        return len(self.entries)

    def max_abs(self, which: str = "delta") -> Fraction:
        return max((abs(getattr(d, which)) for d in self.entries.values()), default=Fraction(0))

    def with_entry(self, a, b, deltas: Deltas) -> "PerturbationAssignment":
        entries = dict(self.entries)
        entries[(as_scalar(a), as_scalar(b))] = Deltas(*(as_scalar(v) for v in deltas))
        return PerturbationAssignment(entries)

    def to_csv(self) -> str:
        lines = ["# perturbation v1"]
        for (a, b) in sorted(self.entries):
            d = self.entries[(a, b)]
            lines.append(",".join(format_scalar(v) for v in (a, b, *d)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "PerturbationAssignment":
        rows = [r.strip() for r in text.splitlines() if r.strip()]
        if not rows or not rows[0].startswith("# perturbation v1"):
            raise ValueError("missing '# perturbation v1' header")
        entries = {}
        for row in rows[1:]:
            a, b, d, dp, ds = (parse_scalar(v) for v in row.split(","))
            entries[(a, b)] = Deltas(d, dp, ds)
        return cls(entries)


class Violation(NamedTuple):
    a: Fraction
    b: Fraction
    which: str
    value: Fraction
    bound: Fraction


def zero_assignment(A: PointSet) -> PerturbationAssignment:
    return PerturbationAssignment({(a, b): ZERO for a in A for b in A})


def random_assignment(
    A: PointSet,
    budget: PerturbationBudget,
    seed: int,
    perturb_sums: bool = False,
) -> PerturbationAssignment:
    """Uniform deltas on a symmetric rational grid strictly inside each bound."""
    rng = random.Random(seed)
    top = DELTA_GRID - 1

    def draw(bound: Fraction) -> Fraction:
        return bound * Fraction(rng.randint(-top, top), DELTA_GRID)

    entries = {}
    for a in A:
        for b in A:
            d = draw(budget.bound(a))
            dp = draw(budget.bound(b))
            ds = draw(budget.sum_bound(a, b)) if perturb_sums else Fraction(0)
            entries[(a, b)] = Deltas(d, dp, ds)
    return PerturbationAssignment(entries)


def geometric_collapse(x: ScalarLike, n: int) -> tuple[PointSet, PerturbationAssignment]:
    """The adversary that turns the perturbed product set into a progression.

    ``A = {x, x+1, ..., x+n-1}`` with ``a_j = x + j``.  Choosing
    ``delta' = 0`` and ``delta_{a_j, a_k} = -jk/(x+k)`` gives
    ``(a_j + delta) * a_k = x**2 + (j+k)*x`` exactly, so ``P`` has ``2n-1``
    elements.
    """
    x = as_scalar(x)
    if n < 1:
        raise ValueError("need n >= 1")
    if x < n:
        raise ValueError(f"collapse needs x >= n, got x={x}, n={n}")
    A = PointSet(tuple(x + j for j in range(n)))
    entries = {}
    for j in range(n):
        for k in range(n):
            entries[(x + j, x + k)] = Deltas(Fraction(-j * k) / (x + k), Fraction(0), Fraction(0))
    return A, PerturbationAssignment(entries)


def _lookup(asg: PerturbationAssignment, a, b) -> Deltas:
    try:
        return asg.entries[(a, b)]
    except KeyError:
        raise ValueError(f"assignment has no entry for pair ({a}, {b})") from None


def perturbed_product_set(A: PointSet, asg: PerturbationAssignment) -> PointSet:
    out = set()
    for a in A:
        for b in A:
            d = _lookup(asg, a, b)
            left, right = a + d.delta, b + d.delta_prime
            if left <= 0 or right <= 0:
                raise DomainError(f"non-positive perturbed factor for pair ({a}, {b})")
            out.add(left * right)
    return PointSet.of(out)


def perturbed_sum_set(A: PointSet, asg: PerturbationAssignment) -> PointSet:
    out = set()
    for a in A:
        for b in A:
            s = a + b + _lookup(asg, a, b).delta_sum
            if s <= 0:
                raise DomainError(f"non-positive perturbed sum for pair ({a}, {b})")
            out.add(s)
    return PointSet.of(out)


def validate_assignment(
    A: PointSet, budget: PerturbationBudget, asg: PerturbationAssignment
) -> list[Violation]:
    """Every bound violation (or missing pair); an empty list means valid."""
    bad = []
    for a in A:
        for b in A:
            d = asg.entries.get((a, b))
            if d is None:
                bad.append(Violation(a, b, "missing", Fraction(0), Fraction(0)))
                continue
            for which, value, bound in (
                ("delta", d.delta, budget.bound(a)),
                ("delta_prime", d.delta_prime, budget.bound(b)),
                ("delta_sum", d.delta_sum, budget.sum_bound(a, b)),
            ):
                if abs(value) >= bound:
                    bad.append(Violation(a, b, which, value, bound))
    return bad


def snap_assignment(
    A: PointSet, budget: PerturbationBudget, quantum: Fraction, phase: Fraction = Fraction(0)
) -> PerturbationAssignment:
    """Move every product onto the lattice ``phase + quantum*Z`` when the budget allows.

    Only the first factor is perturbed.  The nearest lattice point is the
    only candidate: if it is out of reach, so is every other one.
    """
    entries = {}
    for a in A:
        reach = budget.bound(a)
        for b in A:
            p = a * b
            target = round_to_grid(p - phase, quantum) + phase
            # (a + d) * b = target  <=>  d = (target - p) / b
            d = (target - p) / b
            if abs(d) < reach and a + d > 0:
                entries[(a, b)] = Deltas(d, Fraction(0), Fraction(0))
            else:
                entries[(a, b)] = ZERO
    return PerturbationAssignment(entries)


def collapse_search(
    A: PointSet,
    budget: PerturbationBudget,
    quanta: Sequence[ScalarLike],
    seed: int,
    phases_per_quantum: int = 1,
) -> tuple[PerturbationAssignment, int]:
    """Heuristic adversary: snap products to lattices and keep the smallest ``|P|``.

    For each quantum the lattice through 0 is tried first, followed by
    ``phases_per_quantum`` lattices shifted by a seeded random phase.  The
    unperturbed assignment is the starting point, so the result is never
    worse than ``|A.A|``.  No global optimum is claimed.
    """
    rng = random.Random(seed)
    best = zero_assignment(A)
    best_size = len(productset(A, A))
    for q in quanta:
        q = as_scalar(q)
        if q <= 0:
            raise ValueError("quanta must be positive")
        phases = [Fraction(0)]
        phases += [q * Fraction(rng.randrange(DELTA_GRID), DELTA_GRID) for _ in range(phases_per_quantum)]
        for phase in phases:
            asg = snap_assignment(A, budget, q, phase)
            size = len(perturbed_product_set(A, asg))
            if size < best_size:
                best, best_size = asg, size
    return best, best_size


def collapse_summary(x: ScalarLike, n: int, epsilon: ScalarLike = Fraction(1, 2)) -> dict:
    """Sizes and budget bookkeeping for the closed-form collapse adversary."""
    A, asg = geometric_collapse(x, n)
    S = sumset(A, A)
    P = perturbed_product_set(A, asg)
    budget = PerturbationBudget(n, as_scalar(epsilon))
    violations = validate_assignment(A, budget, asg)
    return {
        "n": n,
        "x": format_scalar(as_scalar(x)),
        "epsilon": format_scalar(budget.epsilon),
        "sumset_size": len(S),
        "product_size": len(P),
        "total": len(S) + len(P),
        "max_abs_delta": format_scalar(asg.max_abs("delta")),
        "budget_numerator_lo": format_scalar(budget.numerator),
        "violations": len(violations),
        "pairs": len(asg),
    }
