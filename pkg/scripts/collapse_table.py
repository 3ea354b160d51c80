#!/usr/bin/env python3
"""Closed-form collapse adversary across n: sizes, largest delta, budget use.

Prints one row per n with |A+A|, |P|, the largest |delta| and how many pairs
the epsilon-budget rejects.  The last column is n^2/x, the width the collapse
actually needs, next to the budget numerator n^(1-eps).
"""

import argparse
from fractions import Fraction

from perturblab.perturbation import collapse_summary
from perturblab.scalar import parse_scalar


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--eps", type=parse_scalar, default=Fraction(1, 2))
    ap.add_argument("--x-power", type=int, default=3, help="x = n**x_power")
    args = ap.parse_args()

    print(f"{'n':>4} {'x':>8} {'|A+A|':>6} {'|P|':>5} {'total':>6} {'max|delta|':>12} "
          f"{'budget':>10} {'rejected':>9} {'n^2/x':>9}")
    for n in args.sizes:
        x = n ** args.x_power
        s = collapse_summary(x, n, args.eps)
        print(
            f"{n:>4} {x:>8} {s['sumset_size']:>6} {s['product_size']:>5} {s['total']:>6} "
            f"{float(Fraction(s['max_abs_delta'])):>12.5f} {float(Fraction(s['budget_numerator_lo'])):>10.4f} "
            f"{s['violations']:>5}/{s['pairs']:<4}{n * n / x:>8.4f}"
        )


if __name__ == "__main__":
    main()
