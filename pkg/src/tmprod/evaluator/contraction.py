"""Heuristic evaluation for weights that are not the +-1 Thue-Morse sequence.

Past a start level N = B**E0 the log term is expanded as L(n) = sum_k d_k n**-k
and the weighted power sums over whole levels,

    D_k(E) = sum_{B**E <= n < B**(E+1)} w(n) n**-k,

obey D(E+1) = T D(E) with the upper-triangular transfer matrix

    T[k, k+l] = B**-(k+l) * binom(-k, l) * sum_j mu_j j**l,

whose diagonal sum(mu)/B**k is the per-level contraction.  The tail from N on
is then sum_k d_k Z_k with Z = (I - T)**-1 D(E0).  Three start levels give
three estimates; their spread is reported as the error (not a proof).
"""

from __future__ import annotations

import math
from fractions import Fraction

from gmpy2 import mpfr, mpz

from ..numeric import _UP, BoundedReal, NumericContext, _to_fraction
from ..sequences import WeightFamily, weight_eval
from ..terms import LogTerm
from .blocks import weighted_log_sum

# direct level sums up to this many indices; beyond it levels come from T
DIRECT_LEVEL_LIMIT = 1 << 15


def expansion_coefficients(L: LogTerm, kmax: int) -> list[Fraction]:
    """d_k with L(n) = sum_k d_k n**-k for a balanced L (d_0 = 0)."""
    d = [Fraction(0)] * (kmax + 1)
    for c, f in L.combination:
        g = f.root_shift
        for k in range(1, kmax + 1):
            d[k] += c * (-1) ** (k - 1) * g ** k / k
    return d


def contraction_diverges(L: LogTerm, fam: WeightFamily) -> bool:
    """True iff sum w(n) L(n) diverges: |sum mu| >= B**k at the first k with d_k != 0."""
    if L.is_empty or not L.balanced:
        return not L.is_empty
    d = expansion_coefficients(L, 8)
    kmin = next((k for k in range(1, 9) if d[k]), 8)
    return abs(fam.multiplier_sum) >= Fraction(fam.base) ** kmin


def transfer_matrix(fam: WeightFamily, kmax: int) -> list[list[Fraction]]:
    B = fam.base
    moments = [sum((m * j ** l for j, m in enumerate(fam.multipliers)), Fraction(0)) for l in range(kmax)]
    T = [[Fraction(0)] * (kmax + 1) for _ in range(kmax + 1)]
    for k in range(1, kmax + 1):
        for l in range(0, kmax - k + 1):
            binom = (-1) ** l * math.comb(k + l - 1, l)
            T[k][k + l] = Fraction(binom) * moments[l] / Fraction(B) ** (k + l)
    return T


def _level_sums(ctx: NumericContext, fam: WeightFamily, E: int, kmax: int) -> list:
    mp = ctx.mp
    B = fam.base
    D = [mpfr(0, ctx.precision_bits) for _ in range(kmax + 1)]
    for n in range(B ** E, B ** (E + 1)):
        w = weight_eval(fam, n)
        if not w:
            continue
        inv = mp.div(1, n)
        p = mp.div(mpz(w.numerator), mpz(w.denominator))
        for k in range(1, kmax + 1):
            p = mp.mul(p, inv)
            D[k] = mp.add(D[k], p)
    return D


def _apply(ctx, T, D, kmax):
    mp = ctx.mp
    out = [mpfr(0, ctx.precision_bits) for _ in range(kmax + 1)]
    for k in range(1, kmax + 1):
        acc = mpfr(0, ctx.precision_bits)
        for j in range(k, kmax + 1):
            if T[k][j]:
                acc = mp.add(acc, mp.mul(_mpfr_q(ctx, T[k][j]), D[j]))
        out[k] = acc
    return out


def _mpfr_q(ctx, q: Fraction):
    return ctx.mp.div(mpz(q.numerator), mpz(q.denominator))


def _tail(ctx, T, D, d, kmax):
    """sum_k d_k Z_k with (I - T) Z = D, by back substitution."""
    mp = ctx.mp
    Z = [mpfr(0, ctx.precision_bits) for _ in range(kmax + 1)]
    for k in range(kmax, 0, -1):
        acc = D[k]
        for j in range(k + 1, kmax + 1):
            if T[k][j]:
                acc = mp.add(acc, mp.mul(_mpfr_q(ctx, T[k][j]), Z[j]))
        Z[k] = mp.div(acc, _mpfr_q(ctx, 1 - T[k][k]))
    total = mpfr(0, ctx.precision_bits)
    for k in range(1, kmax + 1):
        if d[k]:
            total = mp.add(total, mp.mul(_mpfr_q(ctx, d[k]), Z[k]))
    return total


def contraction_sum(ctx: NumericContext, L: LogTerm, fam: WeightFamily, digits: int):
    """Estimate sum_{n >= n0} w(n) L(n).  Returns (ball, start level, indices summed)."""
    if L.is_empty:
        return BoundedReal.exact(ctx, 0), 0, 0
    B = fam.base
    n0 = L.k0
    shift = max(abs(f.root_shift) for _, f in L.combination)
    E0 = 1
    while B ** E0 < max(n0, 64 * (shift + 1)):
        E0 += 1
    ratio = max(shift / B ** E0, Fraction(B - 1, B ** (E0 + 1)))
    kmax = 4
    while ratio ** kmax * 2 ** kmax > Fraction(1, 10 ** (digits + 6)):
        kmax += 1
    d = expansion_coefficients(L, kmax)
    T = transfer_matrix(fam, kmax)
    levels = [_level_sums(ctx, fam, E0, kmax)]
    if (B - 1) * B ** (E0 + 1) <= DIRECT_LEVEL_LIMIT:
        levels.append(_level_sums(ctx, fam, E0 + 1, kmax))
    else:
        levels.append(_apply(ctx, T, levels[0], kmax))
    levels.append(_apply(ctx, T, levels[1], kmax))
    estimates = []
    head = weighted_log_sum(ctx, L, fam, n0, B ** E0)
    for i, D in enumerate(levels):
        if i:
            head = head + weighted_log_sum(ctx, L, fam, B ** (E0 + i - 1), B ** (E0 + i))
        estimates.append(head + BoundedReal(_tail(ctx, T, D, d, kmax)))
    best = estimates[-1]
    spread = max(abs(_to_fraction(e.value) - _to_fraction(best.value)) for e in estimates)
    bound = spread + Fraction(1, 2 ** (ctx.precision_bits - ctx.guard_bits))
    return best.widen(_UP.div(mpz(bound.numerator), mpz(bound.denominator))), E0, B ** (E0 + 2) - n0
