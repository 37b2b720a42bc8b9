"""Lemma-generated terms, the even/odd split, and double products over (m, n)."""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..numeric import BoundedReal, NumericContext
from ..polynomials import Poly, PolyLogTerm, linear_factorization, normalize, padd, peval, positive_from
from ..sequences import ConstantOne, WeightFamily, epsilon
from ..terms import FactoredTerm, LinearFactor, term_eval_rational, to_logterm
from .core import (CERTIFIED, DivergentSpec, EvalOptions, EvalResult, InvalidParameter, PrecisionNotAchieved,
                   ProductSpec, finish, log_product, meets_target, pairing_tail_bound, working_context)
from .euler_maclaurin import NotAbsolutelySummable, euler_maclaurin_sum

COLLAPSED = "collapsed"
DIRECT = "direct"


class MissingCollapsedForm(ValueError):
    pass


class NotEpsilonWeight(ValueError):
    pass


# -- the six-factor lemma term ---------------------------------------------------

def _check_param(x) -> Fraction:
    x = Fraction(x)
    if x <= -1:
        raise InvalidParameter(f"lemma parameter {x} must be > -1")
    return x


def lemma_term(a, b) -> FactoredTerm:
    """(n+a)(2n+a+1)(2n+b) / ((2n+a)(n+b)(2n+b+1)) from n = 1, cleared to integer factors."""
    a, b = _check_param(a), _check_param(b)
    D = math.lcm(a.denominator, b.denominator)
    A, Bv = int(a * D), int(b * D)
    triples = [(D, A, 1), (2 * D, A + D, 1), (2 * D, Bv, 1),
               (2 * D, A, -1), (D, Bv, -1), (2 * D, Bv + D, -1)]
    return FactoredTerm.from_triples(triples, 1)


def lemma_rhs(a, b) -> Fraction:
    a, b = _check_param(a), _check_param(b)
    return (b + 1) / (a + 1)


# -- even/odd splitting ----------------------------------------------------------

def split_even_odd(spec: ProductSpec) -> tuple[Fraction, ProductSpec]:
    """Rewrite prod_{n >= n0} f(n)^eps_n as prefactor * prod_{k >= k0} (f(2k)/f(2k+1))^eps_k.

    The prefactor is f(n0)^eps_{n0} when n0 is odd (its partner 2k = n0 - 1
    lies before the start), and 1 otherwise.
    """
    w = spec.weight
    if not (isinstance(w, WeightFamily) and w.is_epsilon_like and w.seed == 1):
        raise NotEpsilonWeight("split_even_odd needs the +-1 Thue-Morse weight")
    if not spec.term.balanced:
        raise DivergentSpec("split_even_odd needs a balanced term")
    n0 = spec.n0
    k0 = -(-n0 // 2)
    pairs = []
    for f, e in spec.term.factors:
        pairs.append((LinearFactor(2 * f.alpha, f.beta), e))
        pairs.append((LinearFactor(2 * f.alpha, f.alpha + f.beta), -e))
    image = FactoredTerm(tuple(pairs), k0).simplified()
    prefactor = Fraction(1)
    if n0 % 2:
        prefactor = term_eval_rational(spec.term, n0) ** epsilon(n0)
    if image.is_trivial:
        image = FactoredTerm(tuple(pairs), k0)
    return prefactor, ProductSpec(image, w, k0)


# -- double products -------------------------------------------------------------

@dataclass(frozen=True)
class DoubleProductSpec:
    """prod_{m >= m0} (prod_{n >= n0} f_m(n)^w(n))^v(m).

    ``inner`` lists factors (alpha, beta(m), exponent) with integer alpha and
    beta an integer polynomial in m.  ``collapsed_rhs = (A, B)`` states that
    the inner product equals B(m)/A(m).
    """

    inner: tuple
    weight: WeightFamily = field(default_factory=WeightFamily.epsilon)
    outer_weight: WeightFamily | ConstantOne = field(default_factory=ConstantOne)
    m0: int = 1
    n0: int = 1
    collapsed_rhs: tuple | None = None

    def __post_init__(self):
        inner = tuple((int(a), normalize(beta), int(e)) for a, beta, e in self.inner)
        object.__setattr__(self, "inner", inner)
        if self.collapsed_rhs is not None:
            A, B = self.collapsed_rhs
            object.__setattr__(self, "collapsed_rhs", (normalize(A), normalize(B)))

    @classmethod
    def from_lemma(cls, a_poly: Poly, b_poly: Poly, m0: int,
                   outer_weight: WeightFamily | ConstantOne | None = None) -> "DoubleProductSpec":
        """Inner term lemma_term(a(m), b(m)); its product is (b(m)+1)/(a(m)+1)."""
        a, b = normalize(a_poly), normalize(b_poly)
        inner = ((1, a, 1), (2, padd(a, (1,)), 1), (2, b, 1),
                 (2, a, -1), (1, b, -1), (2, padd(b, (1,)), -1))
        return cls(inner, WeightFamily.epsilon(), outer_weight or ConstantOne(), m0, 1,
                   (padd(a, (1,)), padd(b, (1,))))

    def inner_term(self, m: int) -> FactoredTerm:
        if m < self.m0:
            raise InvalidParameter(f"m={m} is below m0={self.m0}")
        return FactoredTerm.from_triples([(a, peval(beta, m), e) for a, beta, e in self.inner], self.n0)

    def inner_spec(self, m: int) -> ProductSpec:
        return ProductSpec(self.inner_term(m), self.weight, self.n0)

    def outer_term(self):
        """The collapsed outer factor B(m)/A(m), as a FactoredTerm when it splits over Q."""
        if self.collapsed_rhs is None:
            raise MissingCollapsedForm("no collapsed form for this double product")
        A, B = self.collapsed_rhs
        for p in (A, B):
            if not positive_from(p, self.m0):
                raise InvalidParameter("collapsed factors must be positive for m >= m0")
        if A == B:
            return None
        return linear_factorization(B, A, self.m0) or PolyLogTerm.ratio(B, A, self.m0)


_INNER_CACHE: dict = {}
_INNER_LOCK = threading.Lock()


def inner_log(dspec: DoubleProductSpec, m: int, opts: EvalOptions):
    """Cached certified ln of the inner product at outer index m."""
    key = (dspec, m, opts.target_digits, opts.max_depth)
    with _INNER_LOCK:
        hit = _INNER_CACHE.get(key)
    if hit is None:
        ball, _, certified, depth, terms = log_product(dspec.inner_spec(m), opts)
        hit = (ball, certified, terms)
        with _INNER_LOCK:
            _INNER_CACHE[key] = hit
    return hit


def _collapsed(dspec: DoubleProductSpec, opts: EvalOptions):
    outer = dspec.outer_term()
    ctx = working_context(opts, 0)
    if outer is None:
        return BoundedReal.exact(ctx, 0), ctx, True, 0, 0
    w = dspec.outer_weight
    if isinstance(w, ConstantOne):
        term = to_logterm(outer.simplified()) if isinstance(outer, FactoredTerm) else outer
        try:
            s = euler_maclaurin_sum(ctx, term, dspec.m0, opts.em_order, tol=Fraction(1, 10 ** (opts.target_digits + 3)))
        except NotAbsolutelySummable as exc:
            raise DivergentSpec(str(exc)) from None
        return s, ctx, True, 0, 0
    if not isinstance(outer, FactoredTerm):
        raise InvalidParameter("a weighted outer product needs linear collapsed factors")
    return log_product(ProductSpec(outer, w, dspec.m0), opts)


def _direct(dspec: DoubleProductSpec, opts: EvalOptions):
    t = opts.target_digits
    inner_opts = replace(opts, target_digits=opts.inner_digits or t, depth=None)
    ctx = working_context(opts, 0)
    w = dspec.outer_weight
    M = opts.outer_terms or 64
    tail = None
    if isinstance(w, WeightFamily):
        if not w.is_epsilon_like:
            raise InvalidParameter("direct mode supports the +-1 Thue-Morse outer weight only")
        # stop just before an aligned point 2^j so the outer tail pairs j times
        j = max(2, (M + 1).bit_length() - 1, dspec.m0.bit_length())
        M = 2 ** j - 1
        outer = dspec.outer_term() if dspec.collapsed_rhs is not None else None
        if isinstance(outer, FactoredTerm):
            tail = pairing_tail_bound(to_logterm(outer.with_start(2 ** j).simplified()), j, 1) * abs(w.seed)
    elif dspec.collapsed_rhs is not None:
        outer = dspec.outer_term()
        if outer is None:
            tail = Fraction(0)
        else:
            A, B = dspec.collapsed_rhs
            P = PolyLogTerm.ratio(B, A, dspec.m0)
            if P.summable() and M > 2 * P.root_bound:
                tail = P.tail_abs_bound(M)
    total = BoundedReal.exact(ctx, 0)
    certified = True
    terms = 0
    for m in range(dspec.m0, M + 1):
        ball, inner_certified, used = inner_log(dspec, m, inner_opts)
        certified = certified and inner_certified
        terms += used
        weight = w(m)
        if weight:
            total = total + ball.scale(weight)
    if tail is None:
        certified = False
    else:
        total = total.widen(BoundedReal.exact(ctx, tail).upper)
    return total, ctx, certified, M, terms


def eval_double(ctx: NumericContext | None, dspec: DoubleProductSpec, opts: EvalOptions,
                mode: str = COLLAPSED) -> EvalResult:
    """Collapsed: prod of the stated inner values B(m)/A(m).  Direct: truncate m at M,
    evaluate each inner product, and add the outer tail bound when one is known."""
    started = time.perf_counter()
    if mode == COLLAPSED:
        if dspec.collapsed_rhs is None:
            raise MissingCollapsedForm("collapsed evaluation needs collapsed_rhs")
        log_value, wctx, certified, depth, terms = _collapsed(dspec, opts)
    elif mode == DIRECT:
        log_value, wctx, certified, depth, terms = _direct(dspec, opts)
    else:
        raise InvalidParameter(f"unknown double-product mode {mode!r}")
    result = finish(log_value, opts, certified, depth, terms, started, wctx)
    if mode == COLLAPSED and certified and not meets_target(result, opts):
        # long head sums eat guard bits; one retry with a few more digits
        log_value, wctx, certified, depth, terms = _collapsed(dspec, replace(opts, target_digits=opts.target_digits + 4))
        result = finish(log_value, opts, certified, depth, terms, started, wctx)
    if mode == COLLAPSED and certified and not meets_target(result, opts):
        partial = replace(result, certified=False)
        if opts.mode == CERTIFIED:
            raise PrecisionNotAchieved(f"error {result.abs_error} above 1e-{opts.target_digits}", partial)
        return partial
    return result
