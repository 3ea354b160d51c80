#!/usr/bin/env python3
"""Compare adversaries for |A+A| + |P| under the honest and widened budgets.

For each n the collapse set {x, ..., x+n-1} is attacked by the snap search
with budget numerators n^(1-eps) (the honest budget), n and n^2.  The
honest budget leaves |P| near |A.A|; the collapse only appears once the
numerator reaches about n^2.
"""

import argparse
from fractions import Fraction

from perturblab.perturbation import PerturbationBudget, collapse_search, geometric_collapse
from perturblab.scalar import parse_scalar
from perturblab.sets import productset, sumset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--eps", type=parse_scalar, default=Fraction(1, 2))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--phases", type=int, default=4, help="random lattice phases per quantum")
    args = ap.parse_args()

    print(f"{'n':>4} {'|A+A|':>6} {'|A.A|':>6} {'honest':>7} {'num=n':>7} {'num=n^2':>8} {'4n-2':>6}")
    for n in args.sizes:
        x = Fraction(n ** 3)
        A, _ = geometric_collapse(x, n)
        quanta = [x, x / 2, Fraction(n), Fraction(1)]
        sizes = []
        for budget in (
            PerturbationBudget(n, args.eps),
            PerturbationBudget.widened(n, n),
            PerturbationBudget.widened(n, n * n),
        ):
            _, size = collapse_search(A, budget, quanta, args.seed, args.phases)
            sizes.append(size)
        print(f"{n:>4} {len(sumset(A, A)):>6} {len(productset(A, A)):>6} "
              f"{sizes[0]:>7} {sizes[1]:>7} {sizes[2]:>8} {4 * n - 2:>6}")


if __name__ == "__main__":
    main()
