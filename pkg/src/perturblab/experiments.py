"""Experiment configuration and the incidence report."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .incidence import (
    CurveFamily,
    average_multiplicity_m2,
    build_curves,
    incidence_structure,
    pair_stats,
)
from .perturbation import (
    PerturbationBudget,
    collapse_search,
    geometric_collapse,
    perturbed_product_set,
    random_assignment,
    validate_assignment,
    zero_assignment,
)
from .scalar import (
    DEFAULT_BITS,
    Enclosure,
    as_scalar,
    format_scalar,
    log_enclosure,
    power_enclosure,
    root_enclosure,
)
from .sets import PointSet, make_ap, make_gp, make_random_separated, sumset
from .structure import decompose_dyadic

STRATEGIES = ("zero", "random", "collapse", "search")
SET_TYPES = ("ap", "gp", "random")
BRANCH_FLAG = "branch_e_lt_5nm"


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    epsilon: Fraction = Fraction(1, 2)
    x: Union[Fraction, str] = "auto"
    seed: int = 0
    strategy: str = "zero"
    set_type: str = "random"
    delta_override: Optional[Fraction] = None
    out: Optional[str] = None
    threads: int = 1
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_scalar(self.epsilon))
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.x != "auto":
            object.__setattr__(self, "x", as_scalar(self.x))
        if self.delta_override is not None:
            object.__setattr__(self, "delta_override", as_scalar(self.delta_override))
            if self.delta_override <= 0:
                raise ValueError("delta must be positive")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.set_type not in SET_TYPES:
            raise ValueError(f"set type must be one of {SET_TYPES}")
        if self.strategy == "collapse" and self.resolved_x < self.n:
            raise ValueError("the collapse strategy needs x >= n")

    @property
    def resolved_x(self) -> Fraction:
        # n**3 keeps x far above n at desk scale
        return Fraction(self.n ** 3) if self.x == "auto" else self.x

    @property
    def delta(self) -> Fraction:
        if self.delta_override is not None:
            return self.delta_override
        return power_enclosure(self.n, 1 - self.epsilon, self.bits).lo


def generate_set(set_type: str, n: int, x, seed: int = 0) -> PointSet:
    """The experiment's input set; ``random`` draws integers from ``[x, 2x-1]``."""
    x = as_scalar(x)
    if set_type == "ap":
        return make_ap(x, n)
    if set_type == "gp":
        return make_gp(x, n)
    if set_type == "random":
        return make_random_separated(n, x, 2 * x - 1, 1, seed)
    raise ValueError(f"unknown set type {set_type!r}")


def szekely_constants(I: int, ell: int, p: int, m1: int, m2: Fraction, crossings: int, bits: int = DEFAULT_BITS):
    """Empirical constants of the incidence bound and of the crossing lemma.

    ``C = I / ((m1 m2)^(1/3) (p l)^(2/3) + l + m1 p)`` as an enclosure.  The
    crossing constant ``crossings * p**2 * m1 / e**3`` only makes sense in
    the branch ``e >= 5 p m1``; otherwise the branch flag is returned.
    """
    main = root_enclosure(m1 * Fraction(m2) * (p * ell) ** 2, 3, bits)
    C = Enclosure.exact(I, bits) / (main + ell + m1 * p)
    e = I - ell
    if e > 0 and e >= 5 * p * m1:
        return C, Enclosure.exact(Fraction(crossings * p * p * m1, e ** 3), bits)
    return C, BRANCH_FLAG


def m2_reference_bound(size: int, epsilon: Fraction, bits: int = DEFAULT_BITS) -> Enclosure:
    """``1 + 2 ln N / N**eps``, the averaged multiplicity bound up to its constant."""
    return 1 + 2 * log_enclosure(size, bits) / power_enclosure(size, epsilon, bits)


@dataclass
class IncidenceReport:
    n: int
    epsilon: Fraction
    x: Fraction
    delta: Fraction
    B_size: int
    X_size: int
    Y_size: int
    ell: int
    p: int
    I: int
    e: int
    m1: int
    m2: Fraction
    crossings: int
    C_szekely: Enclosure
    c_crossing: Union[Enclosure, str]
    edge_multiplicity: int
    m2_bound_B: Enclosure
    m2_bound_n: Enclosure
    witness: Optional[tuple]
    warnings: tuple
    seed: int
    elapsed_ms: int = 0

    @property
    def multiplicity_diverges(self) -> bool:
        return self.edge_multiplicity > self.m1

    def to_json(self) -> dict:
        cc = self.c_crossing.to_json() if isinstance(self.c_crossing, Enclosure) else self.c_crossing
        return {
            "n": self.n,
            "epsilon": format_scalar(self.epsilon),
            "x": format_scalar(self.x),
            "delta": format_scalar(self.delta),
            "B_size": self.B_size,
            "X_size": self.X_size,
            "Y_size": self.Y_size,
            "ell": self.ell,
            "p": self.p,
            "I": self.I,
            "e": self.e,
            "m1": self.m1,
            "m2": format_scalar(self.m2),
            "crossings": self.crossings,
            "C_szekely": self.C_szekely.to_json(),
            "c_crossing": cc,
            "edge_multiplicity": self.edge_multiplicity,
            "multiplicity_diverges": self.multiplicity_diverges,
            "m2_bound_B": self.m2_bound_B.to_json(),
            "m2_bound_n": self.m2_bound_n.to_json(),
            "m1_witness": None if self.witness is None else [
                [format_scalar(c) for c in pt] for pt in self.witness
            ],
            "warnings": list(self.warnings),
            "seed": self.seed,
            "elapsed_ms": self.elapsed_ms,
        }


def szekely_check(
    family: CurveFamily,
    n: Optional[int] = None,
    epsilon: Fraction = Fraction(1, 2),
    x: Optional[Fraction] = None,
    seed: int = 0,
    threads: int = 1,
    method: str = "auto",
    bits: int = DEFAULT_BITS,
) -> IncidenceReport:
    """Assemble every count of one family into an :class:`IncidenceReport`."""
    B = family.B
    n = len(B) if n is None else n
    ell = len(family)
    p = len(family.X) * len(family.Y)
    inc = incidence_structure(family, method)
    m2 = average_multiplicity_m2(family, method, threads) if ell >= 2 else Fraction(0)
    crossings = pair_stats(family, method, threads).crossings if ell >= 2 else 0
    C, cc = szekely_constants(inc.incidences, ell, p, inc.m1, m2, crossings, bits)
    return IncidenceReport(
        n=n,
        epsilon=as_scalar(epsilon),
        x=B[0] if x is None else as_scalar(x),
        delta=family.delta,
        B_size=len(B),
        X_size=len(family.X),
        Y_size=len(family.Y),
        ell=ell,
        p=p,
        I=inc.incidences,
        e=inc.incidences - ell,
        m1=inc.m1,
        m2=m2,
        crossings=crossings,
        C_szekely=C,
        c_crossing=cc,
        edge_multiplicity=inc.edge_multiplicity,
        m2_bound_B=m2_reference_bound(max(len(B), 2), as_scalar(epsilon), bits),
        m2_bound_n=m2_reference_bound(max(n, 2), as_scalar(epsilon), bits),
        witness=inc.witness,
        warnings=family.warnings,
        seed=seed,
    )


def incidence_family(config: ExperimentConfig, A: Optional[PointSet] = None) -> CurveFamily:
    """Best dyadic bucket of the input (or generated) set, turned into curves."""
    if A is None:
        A = generate_set(config.set_type, config.n, config.resolved_x, config.seed)
    B = decompose_dyadic(A).best
    if len(B) < 2:
        raise ValueError(f"the fullest dyadic bucket has {len(B)} element(s); need at least 2")
    return build_curves(B, config.delta)


def run_incidence(config: ExperimentConfig, A: Optional[PointSet] = None) -> IncidenceReport:
    start = time.perf_counter()
    family = incidence_family(config, A)
    report = szekely_check(
        family, config.n, config.epsilon, config.resolved_x, config.seed, config.threads, bits=config.bits
    )
    report.elapsed_ms = int((time.perf_counter() - start) * 1000)
    return report


def run_perturb(config: ExperimentConfig) -> dict:
    """``|A+A| + |P|`` for one adversary strategy against the budget."""
    x = config.resolved_x
    budget = PerturbationBudget(config.n, config.epsilon, config.bits)
    if config.strategy == "collapse":
        A, asg = geometric_collapse(x, config.n)
    else:
        A = generate_set(config.set_type, config.n, x, config.seed)
        if config.strategy == "zero":
            asg = zero_assignment(A)
        elif config.strategy == "random":
            asg = random_assignment(A, budget, config.seed)
        else:
            quanta = [x, x / 2, x / 4, budget.numerator]
            asg, _ = collapse_search(A, budget, quanta, config.seed)
    S = sumset(A, A)
    P = perturbed_product_set(A, asg)
    violations = validate_assignment(A, budget, asg)
    return {
        "n": config.n,
        "x": format_scalar(x),
        "epsilon": format_scalar(config.epsilon),
        "strategy": config.strategy,
        "set_type": "collapse" if config.strategy == "collapse" else config.set_type,
        "seed": config.seed,
        "sumset_size": len(S),
        "product_size": len(P),
        "total": len(S) + len(P),
        "pairs": len(A) ** 2,
        "violations": len(violations),
    }
