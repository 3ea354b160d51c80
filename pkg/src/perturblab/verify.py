"""Property suites behind ``perturblab verify``.

Every suite draws its instances from a fixed seed and returns a list of
:class:`~perturblab.invariants.Tally` objects, one per invariant.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from .experiments import generate_set
from .incidence import build_curves, curve_grid_points, pairwise_intersections
from .invariants import Tally, check_family
from .perturbation import (
    PerturbationBudget,
    geometric_collapse,
    perturbed_product_set,
    perturbed_sum_set,
    random_assignment,
    validate_assignment,
)
from .scalar import (
    Enclosure,
    dyadic_index,
    log_enclosure,
    power_enclosure,
    root_enclosure,
    round_to_grid,
)
from .sets import (
    PointSet,
    enforce_separation,
    make_ap,
    make_gp,
    make_random_separated,
    productset,
    sumset,
)
from .structure import (
    decompose_dyadic,
    distinct_ksums_check,
    dyadic_lemma_report,
    extract_doubling_chain,
    is_doubling_chain,
    plunnecke_check,
)

SUITES = ("scalar", "sets", "perturb", "structure", "incidence")
SEED = 20240601


def random_rational(rng: random.Random, lo: int = -200, hi: int = 200, den: int = 12) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_small_set(rng: random.Random, max_size: int, lo: int = 1, hi: int = 60, den: int = 1) -> PointSet:
    size = rng.randint(1, max_size)
    values = set()
    while len(values) < size:
        values.add(Fraction(rng.randint(lo * den, hi * den), den))
    return PointSet.of(values)


def random_doubling_chain(rng: random.Random, length: int) -> PointSet:
    """Consecutive ratios drawn from ``[2, 4]`` in steps of 1/4."""
    cur = Fraction(rng.randint(1, 20), rng.randint(1, 4))
    out = []
    for _ in range(length):
        out.append(cur)
        cur *= 2 + Fraction(rng.randint(0, 8), 4)
    return PointSet(tuple(out))


def plunnecke_corpus(count: int = 200, max_size: int = 8, seed: int = SEED):
    rng = random.Random(seed)
    return [random_small_set(rng, max_size) for _ in range(count)]


def span_pairs(max_total: int = 4):
    return [(k, l) for k in range(max_total + 1) for l in range(max_total + 1) if 1 <= k + l <= max_total]


def dyadic_corpus(sizes=(16, 32, 64), seed: int = SEED):
    """AP, GP, doubling chains and random sets at each size."""
    rng = random.Random(seed)
    out = []
    for n in sizes:
        x = Fraction(n ** 3)
        out.append(("ap", make_ap(x, n)))
        out.append(("gp", make_gp(x, n)))
        out.append(("chain", random_doubling_chain(rng, n)))
        out.append(("random", make_random_separated(n, 1, 4 * n, 1, rng.randrange(1 << 30))))
        out.append(("random-dyadic", generate_set("random", n, x, rng.randrange(1 << 30))))
    return out


# oracles ---------------------------------------------------------------


def naive_contact_points(c1, c2) -> list:
    """Every common point of two polylines by brute force over segment pairs.

    Collinear overlaps contribute the vertices they share, or their left end
    when they share none; other common points are collected as a set.
    """
    def at(u, v, x):
        return u.y + (v.y - u.y) * (x - u.x) / (v.x - u.x)

    if len(c1.vertices) == 1 or len(c2.vertices) == 1:
        single, other = (c1, c2) if len(c1.vertices) == 1 else (c2, c1)
        v = single.vertices[0]
        return [(v.x, v.y)] if other.y_at(v.x) == v.y else []

    points, overlaps = set(), []
    for (p, q), (r, s) in product(c1.segments(), c2.segments()):
        lo, hi = max(p.x, r.x), min(q.x, s.x)
        if lo > hi:
            continue
        h_lo = at(p, q, lo) - at(r, s, lo)
        h_hi = at(p, q, hi) - at(r, s, hi)
        if h_lo == 0 and h_hi == 0:
            if lo == hi:
                points.add((lo, at(p, q, lo)))
            else:
                overlaps.append((lo, hi))
        elif h_lo == 0:
            points.add((lo, at(p, q, lo)))
        elif h_hi == 0:
            points.add((hi, at(p, q, hi)))
        elif (h_lo > 0) != (h_hi > 0):
            x = lo + (hi - lo) * h_lo / (h_lo - h_hi)
            points.add((x, at(p, q, x)))
    # merge overlap pieces into maximal runs
    runs = []
    for lo, hi in sorted(overlaps):
        if runs and lo <= runs[-1][1]:
            runs[-1][1] = max(runs[-1][1], hi)
        else:
            runs.append([lo, hi])
    shared_vertices = set(c1.xs) & set(c2.xs)
    out = []
    for lo, hi in runs:
        inside = sorted(x for x in shared_vertices if lo <= x <= hi) or [lo]
        out.extend((x, c1.y_at(x)) for x in inside)
        points = {pt for pt in points if not lo <= pt[0] <= hi}
    return sorted(out + list(points))


def naive_contacts(c1, c2) -> int:
    return len(naive_contact_points(c1, c2))


def naive_incidences(family) -> int:
    total = 0
    for c in family.curves:
        for x in family.X:
            for y in family.Y:
                if (x, y) in c.vertices:
                    total += 1
                    continue
                for p, q in c.segments():
                    if p.x <= x <= q.x and (y - p.y) * (q.x - p.x) == (q.y - p.y) * (x - p.x):
                        total += 1
                        break
    return total


# suites ----------------------------------------------------------------


def suite_scalar(seed: int = SEED, count: int = 500) -> list[Tally]:
    rng = random.Random(seed)
    rounding = Tally("round_to_grid lands on the grid within delta/2, ties up")
    dyadic = Tally("2**k <= t < 2**(k+1)")
    enclosures = Tally("enclosures contain the value")
    for _ in range(count):
        t = random_rational(rng)
        d = Fraction(rng.randint(1, 50), rng.randint(1, 10))
        r = round_to_grid(t, d)
        ok = (r / d).denominator == 1 and abs(r - t) <= d / 2
        if abs(r - t) == d / 2:
            ok = ok and r > t
        rounding.record(ok, (t, d))
        u = abs(t) + Fraction(1, 1000)
        k = dyadic_index(u)
        dyadic.record(Fraction(2) ** k <= u < Fraction(2) ** (k + 1), u)
    for _ in range(count // 5):
        v = Fraction(rng.randint(1, 10 ** 6), rng.randint(1, 100))
        order = rng.randint(2, 5)
        e = root_enclosure(v, order)
        enclosures.record(e.lo <= e.hi and e.lo ** order <= v <= e.hi ** order, ("root", v, order))
        base = rng.randint(2, 500)
        p = Fraction(rng.randint(1, 8), rng.randint(1, 4))
        e = power_enclosure(base, p)
        q = p.denominator
        enclosures.record(e.lo ** q <= Fraction(base) ** p.numerator <= e.hi ** q, ("power", base, p))
        e = log_enclosure(base)
        enclosures.record(_exp_brackets(e, base), ("log", base))
    exact = Tally("perfect powers give exact enclosures")
    for b in range(2, 40):
        exact.record(power_enclosure(b * b, Fraction(1, 2)) == Enclosure.exact(b), b)
        exact.record(root_enclosure(b ** 3, 3).is_exact, b)
    return [rounding, dyadic, enclosures, exact]


def exp_bounds(t: Fraction, terms: int = 120) -> tuple[Fraction, Fraction]:
    """Rational bounds on ``exp(t)`` for ``0 <= t < terms``: partial sum and geometric tail."""
    s, term = Fraction(0), Fraction(1)
    for k in range(1, terms + 1):
        s += term
        term = term * t / k
    return s, s + term / (1 - t / (terms + 1))


def _exp_brackets(e: Enclosure, n: int) -> bool:
    # exp(lo) <= n <= exp(hi)
    return e.lo <= e.hi and exp_bounds(e.lo)[1] <= n <= exp_bounds(e.hi)[0]


def suite_sets(seed: int = SEED, count: int = 200) -> list[Tally]:
    rng = random.Random(seed)
    sums = Tally("sumset matches the double loop")
    prods = Tally("productset matches the double loop")
    csv = Tally("csv round trip")
    sep = Tally("generators and enforce_separation are 1-separated")
    for _ in range(count):
        A = random_small_set(rng, 6, den=rng.randint(1, 3))
        B = random_small_set(rng, 6)
        sums.record(set(sumset(A, B)) == {a + b for a in A for b in B}, (A, B))
        prods.record(set(productset(A, B)) == {a * b for a in A for b in B}, (A, B))
        csv.record(PointSet.from_csv(A.to_csv()) == A, A)
        sep.record(enforce_separation(A).is_separated(1), A)
        n = rng.randint(2, 20)
        R = make_random_separated(n, 10, 10 + 3 * n, 1, rng.randrange(1 << 30))
        sep.record(len(R) == n and R.is_separated(1), n)
    return [sums, prods, csv, sep]


def suite_perturb(seed: int = SEED, count: int = 100) -> list[Tally]:
    rng = random.Random(seed)
    identity = Tally("collapse identity (x+j+delta)(x+k) = x^2 + (j+k)x")
    sizes = Tally("collapse sizes |A+A| = |P| = 2n-1")
    valid = Tally("random assignments respect the budget")
    oracle = Tally("perturbed sets match the double loop")
    for n in (8, 16, 32):
        x = Fraction(n ** 3)
        A, asg = geometric_collapse(x, n)
        ok = True
        for j in range(n):
            for k in range(n):
                d = asg[(x + j, x + k)]
                ok = ok and (x + j + d.delta) * (x + k + d.delta_prime) == x * x + (j + k) * x
        identity.record(ok, n)
        sizes.record(len(sumset(A, A)) == 2 * n - 1 == len(perturbed_product_set(A, asg)), n)
    for _ in range(count):
        A = random_small_set(rng, 6, lo=5, hi=80)
        budget = PerturbationBudget(len(A), Fraction(rng.randint(1, 4), 4))
        asg = random_assignment(A, budget, rng.randrange(1 << 30), perturb_sums=True)
        valid.record(not validate_assignment(A, budget, asg), A)
        P = {(a + asg[(a, b)].delta) * (b + asg[(a, b)].delta_prime) for a in A for b in A}
        S = {a + b + asg[(a, b)].delta_sum for a in A for b in A}
        oracle.record(set(perturbed_product_set(A, asg)) == P and set(perturbed_sum_set(A, asg)) == S, A)
    return [identity, sizes, valid, oracle]


def suite_structure(seed: int = SEED) -> list[Tally]:
    rng = random.Random(seed)
    pr = Tally("Plunnecke-Ruzsa |kA - lA| <= K^(k+l)|A|")
    for A in plunnecke_corpus(seed=seed):
        for k, l in span_pairs():
            rep = plunnecke_check(A, k, l)
            pr.record(rep.holds, (A, k, l))
    ks = Tally("doubling chains have distinct k-sums")
    for _ in range(50):
        chain = random_doubling_chain(rng, rng.randint(1, 12))
        for k in range(0, min(5, len(chain)) + 1):
            ks.record(distinct_ksums_check(chain, k).distinct, (chain, k))
    chains = Tally("extracted chains double and keep half the buckets")
    lemma = Tally("dyadic lemma implication")
    for _, A in dyadic_corpus(seed=seed):
        chain = extract_doubling_chain(A)
        occupied = len(decompose_dyadic(A).buckets)
        chains.record(is_doubling_chain(chain) and len(chain) >= (occupied + 1) // 2, A)
        for delta in (Fraction(1, 4), Fraction(1, 2)):
            lemma.record(dyadic_lemma_report(A, delta).implication_holds, (len(A), delta))
    return [pr, ks, chains, lemma]


def suite_incidence(seed: int = SEED, count: int = 30) -> list[Tally]:
    rng = random.Random(seed)
    inc = Tally("incidences match the point-in-segment loop")
    pairs = Tally("pair multiplicities match the segment-pair loop")
    for _ in range(count):
        B = random_small_set(rng, 5, lo=8, hi=15)
        fam = build_curves(B, Fraction(rng.randint(1, 12), rng.randint(1, 3)))
        inc.record(
            sum(len(curve_grid_points(c, fam.X, fam.Y)) for c in fam.curves) == naive_incidences(fam), B
        )
        cs = fam.curves
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                pairs.record(pairwise_intersections(cs[i], cs[j]) == naive_contacts(cs[i], cs[j]), (B, i, j))
    out = [inc, pairs]
    for n in (8, 16):
        x = Fraction(n ** 3)
        B = decompose_dyadic(generate_set("random", n, x, seed)).best
        delta = power_enclosure(n, Fraction(1, 2)).lo
        out.extend(_prefixed(f"n={n}", check_family(build_curves(B, delta))))
    return out


def _prefixed(prefix: str, tallies):
    for t in tallies:
        t.name = f"{prefix} {t.name}"
    return tallies


SUITE_FUNCS = {
    "scalar": suite_scalar,
    "sets": suite_sets,
    "perturb": suite_perturb,
    "structure": suite_structure,
    "incidence": suite_incidence,
}


def run_suite(name: str) -> list[Tally]:
    if name == "all":
        return [t for s in SUITES for t in SUITE_FUNCS[s]()]
    if name not in SUITE_FUNCS:
        raise ValueError(f"unknown suite {name!r}")
    return SUITE_FUNCS[name]()
