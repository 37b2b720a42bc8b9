"""Integer polynomials in the outer index m (coefficients constant term first)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .numeric import BoundedReal, DomainError, NumericContext
from .terms import FactoredTerm, LinearFactor, log_of_products, product_tree

Poly = tuple  # (c0, c1, ..., cd), integers


def normalize(p) -> Poly:
    p = [int(c) for c in p]
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p) if p else (0,)


def degree(p: Poly) -> int:
    return len(normalize(p)) - 1


def peval(p: Poly, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def padd(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return normalize([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pmul(p: Poly, q: Poly) -> Poly:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return normalize(out)


def pshift(p: Poly, s: int) -> Poly:
    """Coefficients of p(x + s)."""
    out = [0] * len(p)
    for k, c in enumerate(p):
        for i in range(k + 1):
            out[i] += c * math.comb(k, i) * s ** (k - i)
    return normalize(out)


def format_poly(p: Poly, var: str = "m") -> str:
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mag = abs(c)
        body = (str(mag) if (mag != 1 or k == 0) else "") + ("" if k == 0 else var if k == 1 else f"{var}^{k}")
        terms.append(("-" if c < 0 else "+") + body)
    if not terms:
        return "0"
    text = "".join(terms)
    return text[1:] if text[0] == "+" else text


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def _synthetic_divide(p: list[Fraction], r: Fraction) -> list[Fraction]:
    """p / (x - r) for a root r (p constant-first)."""
    d = len(p) - 1
    out = [Fraction(0)] * d
    acc = Fraction(0)
    for k in range(d, 0, -1):
        acc = acc * r + p[k]
        out[k - 1] = acc
    return out


def rational_roots(p: Poly) -> tuple[list[Fraction], Poly]:
    """Rational roots with multiplicity and the remaining integer cofactor."""
    p = normalize(p)
    roots = []
    cur = [Fraction(c) for c in p]
    while len(cur) > 1 and cur[0] == 0:
        roots.append(Fraction(0))
        cur = cur[1:]
    found = True
    while found and len(cur) > 1:
        found = False
        den = math.lcm(*(c.denominator for c in cur))
        ints = [int(c * den) for c in cur]
        for q in _divisors(ints[-1]):
            for a in _divisors(ints[0]):
                for r in (Fraction(a, q), Fraction(-a, q)):
                    if sum(c * r ** k for k, c in enumerate(cur)) == 0:
                        roots.append(r)
                        cur = _synthetic_divide(cur, r)
                        found = True
                        break
                if found:
                    break
            if found:
                break
    den = math.lcm(*(c.denominator for c in cur))
    return roots, normalize([int(c * den) for c in cur])


def cauchy_bound(p: Poly) -> Fraction:
    """Every complex root satisfies |r| <= 1 + max |c_i / c_d|."""
    p = normalize(p)
    if len(p) == 1:
        return Fraction(0)
    lead = p[-1]
    return 1 + max(Fraction(abs(c), abs(lead)) for c in p[:-1])


def power_sums(p: Poly, kmax: int) -> list[Fraction]:
    """Newton power sums s_k = sum r_i**k of the roots, k = 0..kmax."""
    p = normalize(p)
    d = len(p) - 1
    # e-coefficients of the monic polynomial x^d + a_1 x^{d-1} + ... + a_d
    a = [Fraction(p[d - i], p[d]) for i in range(d + 1)]
    s = [Fraction(d)]
    for k in range(1, kmax + 1):
        total = Fraction(0)
        for i in range(1, min(k - 1, d) + 1):
            total += a[i] * s[k - i]
        if k <= d:
            total += k * a[k]
        s.append(-total)
    return s


def positive_from(p: Poly, m0: int) -> bool:
    """True iff p(m) > 0 for every integer m >= m0 (certified)."""
    p = normalize(p)
    if p[-1] <= 0:
        return False
    shifted = pshift(p, m0)
    if all(c >= 0 for c in shifted) and shifted[0] > 0:
        return True
    bound = m0 + math.ceil(cauchy_bound(p)) + 1
    return all(peval(p, m) > 0 for m in range(m0, bound + 1))


def linear_factorization(num: Poly, den: Poly, m0: int) -> FactoredTerm | None:
    """num(m)/den(m) as a FactoredTerm with a common alpha, if it splits over Q.

    Returns None if either polynomial keeps an irreducible factor of degree >= 2
    or the constant left over after normalisation is not 1.
    """
    pieces = []
    const = Fraction(1)
    for poly, sign in ((num, 1), (den, -1)):
        roots, rest = rational_roots(poly)
        if len(rest) > 1:
            return None
        const *= Fraction(rest[0]) ** sign
        pieces += [(-r, sign) for r in roots]
    alpha = math.lcm(*(g.denominator for g, _ in pieces)) if pieces else 1
    deg = sum(s for _, s in pieces)
    if deg != 0 or const != 1:
        # prod (m + g) with leading constant: rescale to alpha*m + alpha*g
        const *= Fraction(1, alpha) ** deg
    if const != 1:
        return None
    factors = {}
    for g, s in pieces:
        f = LinearFactor(alpha, int(alpha * g))
        factors[f] = factors.get(f, 0) + s
    pairs = tuple(sorted((f, e) for f, e in factors.items() if e))
    return FactoredTerm(pairs, m0)


@dataclass(frozen=True)
class PolyLogTerm:
    """L(m) = sum c_i ln P_i(m) for integer polynomials P_i positive on [m0, inf)."""

    combination: tuple  # ((coef Fraction, Poly), ...)
    m0: int = 0

    def __post_init__(self):
        combo = tuple((Fraction(c), normalize(p)) for c, p in self.combination if c)
        for _, p in combo:
            if not positive_from(p, self.m0):
                raise DomainError(f"polynomial {format_poly(p)} is not positive on m >= {self.m0}")
        object.__setattr__(self, "combination", combo)

    @classmethod
    def ratio(cls, num: Poly, den: Poly, m0: int) -> "PolyLogTerm":
        return cls(((Fraction(1), num), (Fraction(-1), den)), m0)

    @property
    def is_empty(self) -> bool:
        return not self.combination or all(
            sum(c for c, q in self.combination if q == p) == 0 for _, p in self.combination)

    @property
    def root_bound(self) -> Fraction:
        return max((cauchy_bound(p) for _, p in self.combination), default=Fraction(0))

    @property
    def weight(self) -> Fraction:
        """sum |c_i| deg P_i, the number of ln(m - root) pieces counted with weight."""
        return sum((abs(c) * degree(p) for c, p in self.combination), Fraction(0))

    def expansion(self, kmax: int) -> list[Fraction]:
        """Coefficients d_k of L(x) = sum_k d_k x^-k (d_0 must vanish for summability)."""
        d = [Fraction(0)] * (kmax + 1)
        for c, p in self.combination:
            s = power_sums(p, kmax)
            for k in range(1, kmax + 1):
                d[k] -= c * s[k] / k
        return d

    def summable(self) -> bool:
        if self.is_empty:
            return True
        if sum(c * degree(p) for c, p in self.combination) != 0:
            return False
        lead = Fraction(1)
        den = math.lcm(*(c.denominator for c, _ in self.combination))
        num_prod, den_prod = 1, 1
        for c, p in self.combination:
            k = int(c * den)
            if k > 0:
                num_prod *= p[-1] ** k
            else:
                den_prod *= p[-1] ** (-k)
        if num_prod != den_prod:
            return False
        return self.expansion(1)[1] == 0 and lead == 1

    # -- pieces used by Euler-Maclaurin ------------------------------------

    def head_sum(self, ctx: NumericContext, start: int, stop: int) -> BoundedReal:
        # one exact product per polynomial, then a single ln per coefficient
        return log_of_products(ctx, ((c, product_tree(peval(p, m) for m in range(start, stop)))
                                     for c, p in self.combination))

    def value(self, ctx: NumericContext, x: int) -> BoundedReal:
        return log_of_products(ctx, ((c, peval(p, x)) for c, p in self.combination))

    def taylor(self, x: int, order: int) -> list[Fraction]:
        """Exact Taylor coefficients g_r of L(x + h) - L(x), r = 0..order."""
        g = [Fraction(0)] * (order + 1)
        for c, p in self.combination:
            q = pshift(p, x)
            q0 = Fraction(q[0])
            qs = [Fraction(v) / q0 for v in q] + [Fraction(0)] * (order + 1)
            # log of the power series q(h)/q(0) = 1 + ...
            lg = [Fraction(0)] * (order + 1)
            for k in range(1, order + 1):
                acc = k * qs[k]
                for j in range(1, k):
                    acc -= j * lg[j] * qs[k - j]
                lg[k] = acc / k
            for k in range(order + 1):
                g[k] += c * lg[k]
        return g

    def deriv_bound(self, p: int, x) -> Fraction:
        """|L^(p)(y)| <= (p-1)! W / (y - R)^p for y >= x > R."""
        x = Fraction(x)
        R = self.root_bound
        if x <= R:
            raise DomainError("derivative bound needs x beyond the root bound")
        return math.factorial(p - 1) * self.weight / (x - R) ** p

    def integral_tail(self, ctx: NumericContext, N: int, tol: Fraction) -> BoundedReal:
        """int_N^inf L(x) dx via the 1/x expansion with a rigorous truncation bound."""
        R = self.root_bound
        if N <= 2 * R:
            raise DomainError("integral expansion needs N > 2R")
        W = self.weight
        ratio = R / N
        K = 2
        while W * N * ratio ** (K + 1) / ((K + 1) * K * (1 - ratio)) > tol:
            K += 1
        d = self.expansion(K)
        s = sum((d[k] * Fraction(1, N ** (k - 1)) / (k - 1) for k in range(2, K + 1)), Fraction(0))
        rest = W * N * ratio ** (K + 1) / ((K + 1) * K * (1 - ratio))
        return BoundedReal.exact(ctx, s).widen(BoundedReal.exact(ctx, rest).upper)

    def tail_abs_bound(self, M: int) -> Fraction:
        """Upper bound for sum_{m > M} |L(m)|, assuming summable and M > R."""
        R = self.root_bound
        if M <= R:
            raise DomainError("tail bound needs M beyond the root bound")
        d2 = abs(self.expansion(2)[2])
        W = self.weight
        ratio = R / M
        # |L(x)| <= |d2|/x^2 + W sum_{k>=3} R^k / (k x^k); sum_{m>M} m^-k <= M^(1-k)/(k-1)
        return d2 / M + W * M * ratio ** 3 / (6 * (1 - ratio))
