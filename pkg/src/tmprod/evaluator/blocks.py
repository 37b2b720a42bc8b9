"""Weighted sums sum_{a <= n < b} w(n) L(n) over B-adic aligned blocks.

Inside a block [x0, x0 + B**E) the weight factors as w(q) * w_rel(j), and
every log factor is expanded around the block centre:

    ln(alpha (x0 + j) + beta) = ln(D / 2) + sum_r (-1)**(r-1) / r * (v u)**r

with D = alpha (2 x0 + B**E - 1) + 2 beta, v = alpha / D and u = 2j - B**E + 1.
The block sum is then a dot product of the integer moments
M_r = sum_j w_rel(j) u**r with the power sums of v, so a block costs
O(R * #factors) operations however long it is.  For the +-1 Thue-Morse
weight the moments M_r vanish for r < E, which is where the pairing
acceleration shows up in this formulation.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from gmpy2 import mpfr, mpz

from ..numeric import _UP, _ZERO, BoundedReal, NumericContext, _up
from ..sequences import WeightFamily, weight_eval
from ..terms import LogTerm, log_of_products

# blocks whose expansion ratio exceeds this are split into B children
RHO_MAX = Fraction(1, 6)


class MomentTable:
    """Integer moments M'_r(E) = sum_j w'(j) (2j - B**E + 1)**r of one family.

    ``w'`` is the in-block weight scaled by den**E (den = common denominator
    of the multipliers) so all moments are integers.  Levels are built once
    with the recursion over the top digit and extended on demand.
    """

    def __init__(self, fam: WeightFamily):
        self.base = fam.base
        self.den = math.lcm(*(m.denominator for m in fam.multipliers))
        self.mu = [int(m * self.den) for m in fam.multipliers]
        self.order = -1
        self.levels: list[list[int]] = []
        self._lock = threading.Lock()

    def _rebuild(self, order: int):
        self.order = order
        self.levels = [[1] + [0] * order]

    def _extend(self):
        B = self.base
        E = len(self.levels) - 1
        prev = self.levels[-1]
        shifts = [(2 * s - B + 1) * B ** E for s in range(B)]
        nxt = []
        for r in range(self.order + 1):
            total = 0
            for mu, h in zip(self.mu, shifts):
                if mu == 0:
                    continue
                acc = 0
                hp = 1
                for t in range(r + 1):
                    m = prev[r - t]
                    if m:
                        acc += math.comb(r, t) * m * hp
                    hp *= h
                total += mu * acc
            nxt.append(total)
        self.levels.append(nxt)

    def get(self, E: int, order: int) -> list[int]:
        with self._lock:
            if order > self.order:
                self._rebuild(max(order, 2 * self.order, 48))
            while len(self.levels) <= E:
                self._extend()
            return self.levels[E]


_TABLES: dict = {}
_TABLES_LOCK = threading.Lock()


def moment_table(fam: WeightFamily) -> MomentTable:
    key = (fam.base, fam.multipliers)
    with _TABLES_LOCK:
        table = _TABLES.get(key)
        if table is None:
            table = _TABLES[key] = MomentTable(fam)
        return table


def _aligned_blocks(start: int, stop: int, B: int):
    """Maximal aligned blocks (x0, E) covering [start, stop)."""
    n = start
    while n < stop:
        E = 0
        size = 1
        while n % (size * B) == 0 and n + size * B <= stop:
            size *= B
            E += 1
        yield n, E
        n += size


def _block_series(ctx: NumericContext, L: LogTerm, table: MomentTable, x0: int, E: int):
    """Expansion part of one block: (value, error) as raw mpfr numbers.

    Returns None if some factor's expansion ratio is above RHO_MAX.
    """
    B = table.base
    span = B ** E - 1
    Ds = [f.alpha * (2 * x0 + span) + 2 * f.beta for _, f in L.combination]
    rhos = [Fraction(span * f.alpha, D) for (_, f), D in zip(L.combination, Ds)]
    if max(rhos) > RHO_MAX:
        return None
    prec = ctx.precision_bits
    mp = ctx.mp
    # truncation: sum_j |w'| / den**E <= (sum|mu|)**E, tail of sum rho**r / r
    abs_mass = Fraction(sum(abs(m) for m in table.mu), table.den) ** E
    rho_up = [_UP.div(mpz(r.numerator), mpz(r.denominator)) for r in rhos]
    coef_up = [_up(abs(c)) for c, _ in L.combination]
    tol = _UP.mul_2exp(mpfr(1), -prec - 4)
    mass_up = _UP.div(mpz(abs_mass.numerator), mpz(abs_mass.denominator))
    R = max(E, 1)

    def remainder(R):
        s = _ZERO
        for c, rho in zip(coef_up, rho_up):
            s = _UP.add(s, _UP.div(_UP.mul(c, _UP.pow(rho, R)), _UP.mul(mpfr(R), _UP.sub(1, rho))))
        return _UP.mul(mass_up, s)

    rem = remainder(R)
    while rem > tol:
        R += max(1, R // 4)
        rem = remainder(R)
    moments = table.get(E, R)
    scale = mpz(table.den) ** E
    vs = [mp.div(mpz(f.alpha), mpz(D)) for (_, f), D in zip(L.combination, Ds)]
    cs = [mp.div(mpz(c.numerator), mpz(c.denominator)) for c, _ in L.combination]
    pows = list(vs)
    total = mpfr(0, prec)
    magnitude = _ZERO
    for r in range(1, R):
        m = moments[r]
        if m:
            s = mpfr(0, prec)
            s_abs = _ZERO
            for c, p in zip(cs, pows):
                s = mp.add(s, mp.mul(c, p))
                s_abs = _UP.add(s_abs, _UP.abs(_UP.mul(c, p)))
            w = mp.div(mpz(m), scale * r)
            term = mp.mul(s, w)
            total = mp.sub(total, term) if r % 2 == 0 else mp.add(total, term)
            magnitude = _UP.add(magnitude, _UP.mul(s_abs, _UP.abs(w)))
        pows = [mp.mul(p, v) for p, v in zip(pows, vs)]
    # every term carries at most 2r + n_f + 6 roundings, the running sum R more
    ops = 3 * R + len(vs) + 8
    float_err = _UP.mul(_UP.mul_2exp(_UP.mul(mpfr(ops), magnitude), 1 - prec), mpfr("1.1"))
    return total, _UP.add(float_err, rem), Ds, moments[0], scale


def weighted_log_sum(ctx: NumericContext, L: LogTerm, fam: WeightFamily, start: int, stop: int) -> BoundedReal:
    """sum_{start <= n < stop} w(n) L(n) as a certified ball."""
    if start < L.k0:
        raise ValueError(f"start {start} is below the log term's domain {L.k0}")
    zero = BoundedReal.exact(ctx, 0)
    if L.is_empty or stop <= start:
        return zero
    table = moment_table(fam)
    B = fam.base
    total = zero
    leaves = []
    stack = list(reversed(list(_aligned_blocks(start, stop, B))))
    while stack:
        x0, E = stack.pop()
        wq = weight_eval(fam, x0 // B ** E)
        if wq == 0:
            continue
        if E == 0:
            leaves.extend((wq * c, f(x0)) for c, f in L.combination)
            continue
        series = _block_series(ctx, L, table, x0, E)
        if series is None:
            size = B ** (E - 1)
            stack.extend((x0 + s * size, E - 1) for s in reversed(range(B)))
            continue
        value, err, Ds, m0, scale = series
        block = BoundedReal(value, err)
        if m0:
            csum = sum((c for c, _ in L.combination), Fraction(0))
            centre = log_of_products(ctx, [(c, D) for (c, _), D in zip(L.combination, Ds)] + [(-csum, 2)])
            block = block + centre.scale(Fraction(int(m0), int(scale)))
        total = total + block.scale(wq)
    if leaves:
        total = total + log_of_products(ctx, leaves)
    return total


def direct_log_sum(ctx: NumericContext, L: LogTerm, weight, start: int, stop: int) -> BoundedReal:
    """Reference implementation: one exact log per index (for tests and tiny ranges)."""
    return log_of_products(ctx, ((weight(n) * c, f(n)) for n in range(start, stop)
                                 for c, f in L.combination))

