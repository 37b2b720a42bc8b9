"""Direct (truncated outer product) evaluation of the two-level identities.

For each outer truncation M the script prints the true gap against the known
closed form next to the certified bound, so the rate of convergence and the
slack in the bound are both visible.
"""

import argparse
from fractions import Fraction

import mpmath

from tmprod.evaluator import DIRECT, EvalOptions, eval_double
from tmprod.identities import lookup

TRUTHS = {
    "thm1_pi": lambda: mpmath.pi / 2,
    "thm1_sqrt2": lambda: mpmath.sqrt(2),
    "corollary_pi_sqrt2": lambda: mpmath.pi * mpmath.sqrt(2) / 4,
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ids", nargs="*", default=list(TRUTHS))
    ap.add_argument("--sizes", type=int, nargs="*", default=[50, 100, 200, 400, 800])
    ap.add_argument("--inner-digits", type=int, default=14)
    args = ap.parse_args()
    mpmath.mp.dps = 50

    for id in args.ids:
        truth = TRUTHS[id]()
        print(id)
        print(f"  {'M':>5} {'gap':>10} {'bound':>10} {'gap*M':>8}")
        for M in args.sizes:
            opts = EvalOptions(12, outer_terms=M, inner_digits=args.inner_digits)
            r = eval_double(None, lookup(id).spec, opts, DIRECT)
            v = Fraction(r.value)
            g = abs(mpmath.mpf(v.numerator) / v.denominator - truth)
            print(f"  {M:>5} {float(g):10.2e} {float(Fraction(r.abs_error)):10.2e} {float(g * M):8.3f}")


if __name__ == "__main__":
    main()
