"""Independent high-precision reference values, written to tests/data/oracles.json.

Nothing here imports tmprod.  R is the plain partial sum of eps_n * ln f(n)
over n < 2^D in mpmath: partial sums at N = 2^D converge super-exponentially
(the tail is a D-fold difference), so two consecutive D agreeing to the
reported digits is the convergence check.
"""

import argparse
import json
from pathlib import Path

import mpmath


def eps(n: int) -> int:
    return -1 if bin(n).count("1") % 2 else 1


def log_R(D: int):
    total = mpmath.mpf(0)
    for n in range(1, 2 ** D):
        total += eps(n) * mpmath.log(mpmath.mpf((4 * n + 1) * (4 * n + 2)) / (4 * n * (4 * n + 3)))
    return total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth", type=int, default=20)
    ap.add_argument("--dps", type=int, default=60)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"))
    args = ap.parse_args()
    mpmath.mp.dps = args.dps

    lr_prev, lr = log_R(args.depth - 1), log_R(args.depth)
    agree = int(-mpmath.log10(abs(lr - lr_prev)))
    R = mpmath.exp(lr)
    phi = 2 ** mpmath.mpf(-0.5) * mpmath.exp(mpmath.euler) * mpmath.mpf(2) / 3 * R
    pi = mpmath.pi
    values = {
        "R": mpmath.nstr(R, 45, strip_zeros=False),
        "R_agreeing_digits": agree,
        "phi": mpmath.nstr(phi, 45, strip_zeros=False),
        "gamma_quarter": mpmath.nstr(mpmath.gamma(mpmath.mpf(1) / 4), 40, strip_zeros=False),
        "gamma_product": mpmath.nstr(pi ** (mpmath.mpf(3) / 4) * mpmath.sqrt(2) / mpmath.gamma(0.25), 45),
        "pi_over_sinh_pi": mpmath.nstr(pi / mpmath.sinh(pi), 45),
        "borwein_n2_direct": mpmath.nstr(mpmath.nprod(lambda m: (m ** 2 - 1) / (m ** 2 + 1), [2, mpmath.inf]), 30),
        "borwein_n4_direct": mpmath.nstr(mpmath.nprod(lambda m: (m ** 4 - 1) / (m ** 4 + 1), [2, mpmath.inf]), 30),
        "two_pow_minus_two_fifths": mpmath.nstr(mpmath.mpf(2) ** (-mpmath.mpf(2) / 5), 45),
        "sinh_pi": mpmath.nstr(mpmath.sinh(pi), 45),
        "euler_gamma": mpmath.nstr(mpmath.euler, 45),
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(values, indent=2) + "\n")
    for k, v in values.items():
        print(f"{k:26s} {v}")


if __name__ == "__main__":
    main()
