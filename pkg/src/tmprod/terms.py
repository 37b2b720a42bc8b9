"""Exact algebra of product terms f(n) = prod (alpha_i n + beta_i) ** e_i.

:class:`FactoredTerm` is the term itself; :class:`LogTerm` is its logarithm
``sum c_i ln(alpha_i n + beta_i)`` with rational coefficients, the form that is
closed under the pairing substitution ``n -> B*k + j``.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .numeric import BoundedReal, DomainError, NumericContext, ln_ball
from .sequences import WeightFamily


class IndexBelowStart(ValueError):
    pass


class NotBalanced(ValueError):
    pass


class Convergence(enum.Enum):
    DIVERGENT = "Divergent"
    CONDITIONAL = "ConditionallySummable"
    ABSOLUTE = "AbsolutelySummable"


@dataclass(frozen=True, order=True)
class LinearFactor:
    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")

    def __call__(self, n):
        return self.alpha * n + self.beta

    def substitute(self, base: int, j: int) -> "LinearFactor":
        """The factor as a function of k after n = base*k + j."""
        return LinearFactor(base * self.alpha, self.alpha * j + self.beta)

    @property
    def root_shift(self) -> Fraction:
        """gamma = beta / alpha, so the factor is alpha * (n + gamma)."""
        return Fraction(self.beta, self.alpha)


def _merge(pairs) -> dict:
    merged = defaultdict(Fraction)
    for factor, e in pairs:
        merged[factor] += e
    return {f: e for f, e in merged.items() if e != 0}


def _alpha_balance(pairs) -> bool:
    """Exponent sum zero and prod alpha**e == 1, i.e. f(n) -> 1."""
    pairs = list(pairs)
    if sum((Fraction(e) for _, e in pairs), Fraction(0)) != 0:
        return False
    den = math.lcm(*(Fraction(e).denominator for _, e in pairs)) if pairs else 1
    num, dnm = 1, 1
    for f, e in pairs:
        k = Fraction(e) * den
        if k > 0:
            num *= f.alpha ** int(k)
        else:
            dnm *= f.alpha ** int(-k)
    return num == dnm


@dataclass(frozen=True)
class FactoredTerm:
    factors: tuple
    n0: int = 0

    def __post_init__(self):
        pairs = tuple((f if isinstance(f, LinearFactor) else LinearFactor(*f), int(e))
                      for f, e in self.factors)
        for f, e in pairs:
            if e == 0:
                raise ValueError("exponents must be nonzero")
            if f(self.n0) <= 0:
                raise ValueError(f"factor {f.alpha}n{f.beta:+d} is not positive at n0={self.n0}")
        object.__setattr__(self, "factors", pairs)

    @classmethod
    def from_triples(cls, triples, n0: int = 0) -> "FactoredTerm":
        return cls(tuple((LinearFactor(a, b), e) for a, b, e in triples), n0)

    def to_triples(self) -> list:
        return [[f.alpha, f.beta, e] for f, e in self.factors]

    def simplified(self) -> "FactoredTerm":
        merged = _merge(self.factors)
        return FactoredTerm(tuple(sorted((f, int(e)) for f, e in merged.items())), self.n0)

    @property
    def is_trivial(self) -> bool:
        return not _merge(self.factors)

    @property
    def balanced(self) -> bool:
        return _alpha_balance(self.factors)

    @property
    def c1(self) -> Fraction:
        return sum((e * f.root_shift for f, e in self.factors), Fraction(0))

    def with_start(self, n0: int) -> "FactoredTerm":
        return FactoredTerm(self.factors, n0)

    def describe(self) -> str:
        num = [f for f, e in self.factors for _ in range(e) if e > 0]
        den = [f for f, e in self.factors for _ in range(-e) if e < 0]

        def show(fs):
            if not fs:
                return "1"
            return "".join(f"({_fmt_factor(f)})" for f in fs)
        return f"{show(num)}/{show(den)}"


def _fmt_factor(f: LinearFactor, var: str = "n") -> str:
    a = "" if f.alpha == 1 else str(f.alpha)
    if f.beta == 0:
        return f"{a}{var}"
    return f"{a}{var}{f.beta:+d}"


def term_eval_rational(t: FactoredTerm, n: int) -> Fraction:
    if n < t.n0:
        raise IndexBelowStart(f"n={n} is below the start index {t.n0}")
    value = Fraction(1)
    for f, e in t.factors:
        value *= Fraction(f(n)) ** e
    return value


def classify(t: FactoredTerm) -> tuple[Convergence, Fraction]:
    """Convergence class of sum w(n) ln f(n) and the 1/n coefficient c1."""
    c1 = t.c1
    if not t.balanced:
        return Convergence.DIVERGENT, c1
    if c1 == 0:
        return Convergence.ABSOLUTE, c1
    return Convergence.CONDITIONAL, c1


@dataclass(frozen=True)
class LogTerm:
    combination: tuple
    k0: int = 0

    def __post_init__(self):
        merged = _merge((f if isinstance(f, LinearFactor) else LinearFactor(*f), Fraction(c))
                        for c, f in ((c, f) for c, f in self.combination))
        for f in merged:
            if f(self.k0) <= 0:
                raise DomainError(f"factor {f} not positive at k0={self.k0}")
        combo = tuple((merged[f], f) for f in sorted(merged))
        object.__setattr__(self, "combination", combo)

    @property
    def is_empty(self) -> bool:
        return not self.combination

    @property
    def balanced(self) -> bool:
        return _alpha_balance((f, c) for c, f in self.combination)

    @property
    def c1(self) -> Fraction:
        return sum((c * f.root_shift for c, f in self.combination), Fraction(0))

    @property
    def abs_coef_sum(self) -> Fraction:
        return sum((abs(c) for c, _ in self.combination), Fraction(0))

    @property
    def integral_coefficients(self) -> bool:
        return all(c.denominator == 1 for c, _ in self.combination)

    def exact_factor_value(self, k: int):
        """exp(L(k)) as an exact rational when all coefficients are integers."""
        value = Fraction(1)
        for c, f in self.combination:
            value *= Fraction(f(k)) ** int(c)
        return value

    def deriv_coefficient(self, r: int, x) -> Fraction:
        """L^(r)(x) / (r-1)!, exactly: (-1)^(r-1) sum c_i (alpha_i / (alpha_i x + beta_i))^r."""
        x = Fraction(x)
        s = sum((c * (Fraction(f.alpha) / f(x)) ** r for c, f in self.combination), Fraction(0))
        return s if r % 2 == 1 else -s

    def describe(self) -> str:
        if self.is_empty:
            return "0"
        parts = []
        for c, f in self.combination:
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign}{abs(c)} ln({_fmt_factor(f, 'k')})")
        return " ".join(parts)


def to_logterm(t: FactoredTerm) -> LogTerm:
    if not t.balanced:
        raise NotBalanced(f"term {t.describe()} is not balanced")
    return LogTerm(tuple((Fraction(e), f) for f, e in t.factors), t.n0)


def pair_logterm(L: LogTerm, fam: WeightFamily) -> LogTerm:
    """L'(k) = sum_j mu_j L(B k + j), one level of dyadic (B-adic) pairing."""
    B = fam.base
    combo = [(c * mu, f.substitute(B, j))
             for j, mu in enumerate(fam.multipliers) if mu != 0
             for c, f in L.combination]
    k0 = -(-L.k0 // B)
    return LogTerm(tuple(combo), k0)


def pair_logterm_depth(L: LogTerm, fam: WeightFamily, depth: int) -> LogTerm:
    for _ in range(depth):
        L = pair_logterm(L, fam)
    return L


def logterm_deriv_bound(L: LogTerm, d: int, x) -> Fraction:
    """sum |c_i| (d-1)! alpha_i^d / (alpha_i x + beta_i)^d, decreasing in x."""
    if d < 1:
        raise ValueError("d must be >= 1")
    x = Fraction(x)
    if x < L.k0:
        raise DomainError(f"x={x} is below k0={L.k0}")
    fact = math.factorial(d - 1)
    total = Fraction(0)
    for c, f in L.combination:
        v = f(x)
        if v <= 0:
            raise DomainError(f"factor {f} not positive at x={x}")
        total += abs(c) * fact * Fraction(f.alpha) ** d / v ** d
    return total


def logterm_eval(ctx: NumericContext, L: LogTerm, k: int) -> BoundedReal:
    if k < L.k0:
        raise DomainError(f"k={k} is below k0={L.k0}")
    return log_of_products(ctx, ((c, f(k)) for c, f in L.combination))


def log_of_products(ctx: NumericContext, weighted_values) -> BoundedReal:
    """sum_i c_i ln(v_i) for positive integers v_i.

    Values sharing a coefficient are multiplied exactly (:func:`product_tree`);
    the products for ``+c`` and ``-c`` are divided with one correct rounding, so
    each distinct ``|c|`` costs a single ln of a number of moderate size.
    """
    buckets = defaultdict(list)
    for c, v in weighted_values:
        if c:
            if v <= 0:
                raise DomainError(f"ln of non-positive value {v}")
            buckets[c].append(v)
    merged = defaultdict(list)
    for c, vs in buckets.items():
        merged[Fraction(c)].extend(vs)
    buckets = merged
    total = BoundedReal.exact(ctx, 0)
    for m in sorted({abs(c) for c in buckets}):
        num = product_tree(buckets.get(m, ()))
        den = product_tree(buckets.get(-m, ()))
        total = total + ln_ball(ctx, BoundedReal.quotient(ctx, num, den)).scale(m)
    return total


def product_tree(values) -> int:
    # GMP multiplication is subquadratic; Python ints are not
    values = [gmpy2.mpz(v) for v in values]
    if not values:
        return 1
    while len(values) > 1:
        nxt = [values[i] * values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            nxt.append(values[-1])
        values = nxt
    return int(values[0])
