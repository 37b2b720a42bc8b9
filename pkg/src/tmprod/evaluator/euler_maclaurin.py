"""Euler-Maclaurin summation of absolutely summable log terms.

    sum_{m >= N} f(m) = int_N^inf f + f(N)/2 - sum_{k=1}^{q} B_2k/(2k)! f^(2k-1)(N) + R,
    |R| <= 2 zeta(2q)/(2 pi)^(2q) * int_N^inf |f^(2q)|

The head [N0, N) is summed exactly (one product of integers per coefficient,
then one logarithm).  N is chosen as the smallest power of two past N0 that
pushes the remainder bound under the tolerance.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath

from ..numeric import BoundedReal, NumericContext, ln_ball
from ..polynomials import PolyLogTerm
from ..sequences import WeightFamily
from ..terms import LogTerm, logterm_deriv_bound, logterm_eval, log_of_products
from .blocks import weighted_log_sum

_ONES = WeightFamily(2, (1, 1), name="one")


class NotAbsolutelySummable(ValueError):
    pass


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    p, q = mpmath.bernfrac(n)
    return Fraction(int(p), int(q))


def _zeta_bound(order: int) -> Fraction:
    # zeta(2) < 1.645, zeta(4) < 1.0824 and zeta decreases
    return Fraction(1645, 1000) if order == 2 else Fraction(10824, 10000)


class _LinearAdapter:
    """Euler-Maclaurin pieces of sum_i c_i ln(alpha_i x + beta_i)."""

    def __init__(self, L: LogTerm):
        if not L.balanced or L.c1 != 0:
            raise NotAbsolutelySummable(f"log term {L.describe()} is not absolutely summable")
        self.L = L
        self.start = L.k0

    def head(self, ctx, a, b):
        if b - a > 512:
            return weighted_log_sum(ctx, self.L, _ONES, a, b)
        return log_of_products(ctx, ((c, f(m)) for m in range(a, b) for c, f in self.L.combination))

    def value(self, ctx, x):
        return logterm_eval(ctx, self.L, x)

    def odd_derivatives(self, x, q):
        # f^(r)(x) = (r-1)! * deriv_coefficient(r, x)
        return [math.factorial(r - 1) * self.L.deriv_coefficient(r, x) for r in range(1, 2 * q, 2)]

    def remainder_integral(self, order, x) -> Fraction:
        """int_x^inf |f^(order)| <= D_(order-1)(x), D_r the derivative bound."""
        return logterm_deriv_bound(self.L, order - 1, x)

    def integral(self, ctx, N, tol):
        # -sum (c/alpha) [(alpha N + beta) ln(alpha N + beta) - beta ln alpha]
        guard = 2 * max(8, N.bit_length()) + 16
        wide = ctx.with_precision(ctx.precision_bits + guard)
        acc = BoundedReal.exact(wide, 0)
        for c, f in self.L.combination:
            v = f(N)
            piece = ln_ball(wide, BoundedReal.exact(wide, v)).scale(v)
            if f.beta:
                piece = piece - ln_ball(wide, BoundedReal.exact(wide, f.alpha)).scale(f.beta)
            acc = acc - piece.scale(Fraction(c) / f.alpha)
        return acc

    def min_split(self):
        return max(self.start, 1 + max(abs(f.root_shift) for _, f in self.L.combination))


class _PolyAdapter:
    def __init__(self, P: PolyLogTerm):
        if not P.summable():
            raise NotAbsolutelySummable("polynomial log term is not absolutely summable")
        self.P = P
        self.start = P.m0

    def head(self, ctx, a, b):
        return self.P.head_sum(ctx, a, b)

    def value(self, ctx, x):
        return self.P.value(ctx, x)

    def odd_derivatives(self, x, q):
        g = self.P.taylor(x, 2 * q - 1)
        return [g[r] * math.factorial(r) for r in range(1, 2 * q, 2)]

    def remainder_integral(self, order, x) -> Fraction:
        # int_x^inf (p-1)! W/(y-R)^p dy = (p-2)! W / (x-R)^(p-1)
        R = self.P.root_bound
        return math.factorial(order - 2) * self.P.weight / (Fraction(x) - R) ** (order - 1)

    def integral(self, ctx, N, tol):
        return self.P.integral_tail(ctx, N, tol)

    def min_split(self):
        return max(self.start, 2 * math.ceil(self.P.root_bound) + 2)


def _adapter(term):
    if isinstance(term, LogTerm):
        return _LinearAdapter(term)
    if isinstance(term, PolyLogTerm):
        return _PolyAdapter(term)
    raise TypeError(f"cannot sum {type(term).__name__}")


def em_remainder_bound(term, order: int, N: int) -> Fraction:
    return _remainder(_adapter(term), order, N)


def _remainder(ad, order, N) -> Fraction:
    # (2 pi)^order >= (6.28)^order keeps the bound rational and conservative
    two_pi = Fraction(628, 100)
    return 2 * _zeta_bound(order) / two_pi ** order * ad.remainder_integral(order, N)


def euler_maclaurin_sum(ctx: NumericContext, term, N0: int, order: int = 12,
                        tol: Fraction | None = None, split: int | None = None) -> BoundedReal:
    """sum_{m >= N0} L(m) for an absolutely summable LogTerm or PolyLogTerm.

    ``tol`` is the target for the remainder (default: the context's requested
    accuracy, i.e. precision minus guard bits, with 8 bits to spare); ``split``
    forces the head/tail split point instead of choosing it.
    """
    if order % 2 or not 2 <= order <= 12:
        raise ValueError("order must be even and in [2, 12]")
    if (isinstance(term, LogTerm) and term.is_empty) or (isinstance(term, PolyLogTerm) and term.is_empty):
        return BoundedReal.exact(ctx, 0)
    ad = _adapter(term)
    if N0 < ad.start:
        raise ValueError(f"N0={N0} is below the term's domain start {ad.start}")
    if tol is None:
        tol = Fraction(1, 2 ** (ctx.precision_bits - ctx.guard_bits + 8))
    low = max(N0, math.ceil(ad.min_split()))
    if split is None:
        N = 16
        while N < low or _remainder(ad, order, N) > tol:
            N *= 2
    else:
        N = max(split, low)
    rem = _remainder(ad, order, N)
    q = order // 2
    total = ad.head(ctx, N0, N) if N > N0 else BoundedReal.exact(ctx, 0)
    total = total + ad.integral(ctx, N, tol)
    total = total + ad.value(ctx, N).scale(Fraction(1, 2))
    corr = Fraction(0)
    for k, deriv in enumerate(ad.odd_derivatives(N, q), start=1):
        corr += bernoulli(2 * k) / math.factorial(2 * k) * deriv
    total = total - BoundedReal.exact(ctx, corr)
    return total.widen(BoundedReal.exact(ctx, rem).upper)
