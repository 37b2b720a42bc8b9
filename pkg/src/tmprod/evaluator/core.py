"""Single weighted products prod_{n >= n0} f(n) ** w(n)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..numeric import BoundedReal, NumericContext, _to_fraction, elem_fn, format_ball, truncate_decimal
from ..sequences import ConstantOne, WeightFamily, ZeroOneTM
from ..terms import Convergence, FactoredTerm, LogTerm, classify, logterm_deriv_bound, to_logterm
from .blocks import weighted_log_sum
from .contraction import contraction_sum, contraction_diverges
from .euler_maclaurin import euler_maclaurin_sum

CERTIFIED = "certified"
HEURISTIC = "heuristic"


class DivergentSpec(ValueError):
    pass


class InvalidParameter(ValueError):
    pass


class PrecisionNotAchieved(RuntimeError):
    def __init__(self, message: str, partial: "EvalResult | None" = None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class ProductSpec:
    term: FactoredTerm
    weight: WeightFamily | ZeroOneTM | ConstantOne
    n0: int = 0

    def __post_init__(self):
        if self.term.n0 != self.n0:
            object.__setattr__(self, "term", self.term.with_start(self.n0))


@dataclass(frozen=True)
class EvalOptions:
    target_digits: int = 30
    max_depth: int = 24
    max_terms: int = 10 ** 15
    mode: str = CERTIFIED
    em_order: int = 12
    depth: int | None = None          # force the pairing depth
    outer_terms: int | None = None    # outer truncation M for direct double products
    inner_digits: int | None = None   # inner accuracy for direct double products

    def __post_init__(self):
        if self.target_digits < 1:
            raise InvalidParameter("target_digits must be >= 1")
        if self.mode not in (CERTIFIED, HEURISTIC):
            raise InvalidParameter(f"unknown mode {self.mode!r}")
        if self.em_order % 2 or not 2 <= self.em_order <= 12:
            raise InvalidParameter("em_order must be even and <= 12")


@dataclass(frozen=True)
class EvalResult:
    value: str
    abs_error: str
    certified: bool
    depth_used: int
    terms_used: int
    elapsed_ms: float = field(default=0.0, compare=False)
    ball: BoundedReal | None = field(default=None, compare=False, repr=False)

    def as_dict(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error, "certified": self.certified,
                "depth": self.depth_used, "terms": self.terms_used, "elapsed_ms": round(self.elapsed_ms, 3)}


def printed_digits(target_digits: int) -> int:
    return math.ceil(1.05 * target_digits) + 2


def working_context(opts: EvalOptions, depth: int = 0) -> NumericContext:
    """precision = ceil(t log2 10) + 32 + 2 d bits."""
    bits = math.ceil(opts.target_digits * math.log2(10)) + 32 + 2 * depth
    return NumericContext(max(64, bits), 32 + 2 * depth)


def finish(log_value: BoundedReal, opts: EvalOptions, certified: bool, depth: int, terms: int,
           started: float, ctx: NumericContext) -> EvalResult:
    """exp of a log-space ball, printed to ceil(1.05 t) + 2 significant digits."""
    if log_value.value == 0 and log_value.abs_error == 0:
        ball = BoundedReal.exact(ctx, 1)  # empty product, no rounding
    else:
        ball = elem_fn(ctx, "exp", log_value)
    text, err = format_ball(ball, printed_digits(opts.target_digits))
    return EvalResult(text, err, certified, depth, terms, (time.perf_counter() - started) * 1000, ball)


def error_fraction(ball: BoundedReal) -> Fraction:
    return _to_fraction(ball.abs_error)


def meets_target(result: EvalResult, opts: EvalOptions) -> bool:
    _, trunc = truncate_decimal(_to_fraction(result.ball.value), printed_digits(opts.target_digits))
    return _to_fraction(result.ball.abs_error) + trunc <= Fraction(1, 10 ** opts.target_digits)


# -- certified +-1 Thue-Morse path ---------------------------------------------

def pairing_tail_bound(L: LogTerm, d: int, K: int) -> Fraction:
    """sum_{k >= K} |L_d(k)| <= 2^(d(d-1)/2) [H(K) + int_K^inf H], H(x) = deriv bound at 2^d x."""
    if d < 2:
        raise ValueError("the integral tail bound needs depth >= 2")
    x = 2 ** d * K
    head = logterm_deriv_bound(L, d, x)
    integral = Fraction(0)
    fact = math.factorial(d - 1)
    for c, f in L.combination:
        # int_K^inf (d-1)! a^d / (a 2^d y + b)^d dy
        integral += abs(c) * fact * Fraction(f.alpha) ** (d - 1) / (2 ** d * (d - 1) * Fraction(f(x)) ** (d - 1))
    return 2 ** (d * (d - 1) // 2) * (head + integral)


def _start_block(n0: int, d: int) -> int:
    return max(1, -(-n0 // 2 ** d))


def choose_depth(L: LogTerm, tol: Fraction, opts: EvalOptions) -> tuple[int, int]:
    """Smallest d with tail < tol at K = max(64, 4d, k0); else escalate K at the deepest level."""
    n0 = L.k0
    depths = [opts.depth] if opts.depth is not None else range(2, opts.max_depth + 1)
    for d in depths:
        K = max(64, 4 * d, _start_block(n0, d))
        if pairing_tail_bound(L, d, K) < tol:
            return d, K
    d = depths[-1]
    K = max(64, 4 * d, _start_block(n0, d))
    while pairing_tail_bound(L, d, K) >= tol:
        K *= 4
        if 2 ** d * K > opts.max_terms:
            raise PrecisionNotAchieved(f"tail bound above {float(tol):.3g} within the term budget")
    return d, K


def epsilon_log_sum(L: LogTerm, fam: WeightFamily, opts: EvalOptions, digits: int | None = None):
    """Certified sum_{n >= n0} w(n) L(n) for w = seed * eps.  Returns (ball, ctx, d, terms)."""
    digits = opts.target_digits if digits is None else digits
    seed = abs(fam.seed)
    tol = Fraction(1, 10 ** (digits + 2)) / max(seed, 1)
    d, K = choose_depth(L, tol, opts)
    n0 = L.k0
    while True:
        ctx = working_context(replace(opts, target_digits=digits), d)
        stop = 2 ** d * K
        total = weighted_log_sum(ctx, L, fam, n0, stop)
        tail = pairing_tail_bound(L, d, K) * seed
        total = total.widen(BoundedReal.exact(ctx, tail).upper)
        if error_fraction(total) <= tol * 4 or opts.depth is not None:
            return total, ctx, d, stop - n0
        # tie-break: K x 4 within the budget, then d + 2
        if 2 ** d * K * 4 <= opts.max_terms:
            K *= 4
        elif d + 2 <= opts.max_depth:
            d += 2
            K = max(64, 4 * d, _start_block(n0, d))
        else:
            raise PrecisionNotAchieved("budget exhausted")


# -- dispatch --------------------------------------------------------------------

def _check_summable(spec: ProductSpec) -> tuple[Convergence, Fraction]:
    kind, c1 = classify(spec.term)
    if kind is Convergence.DIVERGENT:
        raise DivergentSpec(f"term {spec.term.describe()} is not balanced")
    w = spec.weight
    if isinstance(w, (ZeroOneTM, ConstantOne)) and kind is not Convergence.ABSOLUTE:
        raise DivergentSpec(f"weight {w.label} needs an absolutely summable term (c1 = {c1})")
    if isinstance(w, WeightFamily) and contraction_diverges(to_logterm(spec.term), w):
        raise DivergentSpec(f"weight {w.label} does not make the series converge")
    return kind, c1


def log_product(spec: ProductSpec, opts: EvalOptions):
    """sum_{n >= n0} w(n) ln f(n) as (ball, ctx, certified, depth, terms)."""
    term = spec.term.simplified() if not spec.term.is_trivial else spec.term
    if spec.term.is_trivial:
        ctx = working_context(opts, 0)
        return BoundedReal.exact(ctx, 0), ctx, True, 0, 0
    _check_summable(spec)
    L = to_logterm(term)
    w = spec.weight
    t = opts.target_digits
    if isinstance(w, ConstantOne):
        ctx = working_context(opts, 0)
        s = euler_maclaurin_sum(ctx, L, spec.n0, opts.em_order, tol=Fraction(1, 10 ** (t + 3)))
        return s, ctx, True, 0, 0
    if isinstance(w, ZeroOneTM):
        eps_sum, ctx, d, terms = epsilon_log_sum(L, WeightFamily.epsilon(), opts)
        plain = euler_maclaurin_sum(ctx, L, spec.n0, opts.em_order, tol=Fraction(1, 10 ** (t + 3)))
        return (plain - eps_sum).scale(Fraction(1, 2)), ctx, True, d, terms
    if w.is_epsilon_like:
        s, ctx, d, terms = epsilon_log_sum(L, w, opts)
        return s, ctx, True, d, terms
    # convergent but outside the certified families: heuristic contraction
    ctx = working_context(opts, 16)
    s, levels, terms = contraction_sum(ctx, L, w, t)
    return s, ctx, False, levels, terms


def eval_product(ctx: NumericContext | None, spec: ProductSpec, opts: EvalOptions) -> EvalResult:
    """exp(sum_{n >= n0} w(n) ln f(n)) with a certified (or estimated) error bound.

    The working precision is derived from ``opts``; ``ctx`` is accepted for
    interface symmetry and may be None.
    """
    started = time.perf_counter()
    log_value, wctx, certified, depth, terms = log_product(spec, opts)
    result = finish(log_value, opts, certified, depth, terms, started, wctx)
    if certified and not meets_target(result, opts):
        # a large value amplifies the log-space error: ask for more digits once
        extra = max(1, len(result.value.split(".")[0].lstrip("-0"))) + 1
        log_value, wctx, certified, depth, terms = log_product(
            spec, replace(opts, target_digits=opts.target_digits + extra))
        result = finish(log_value, opts, certified, depth, terms, started, wctx)
    if certified and not meets_target(result, opts):
        partial = replace(result, certified=False)
        if opts.mode == CERTIFIED:
            raise PrecisionNotAchieved(f"error {result.abs_error} above 1e-{opts.target_digits}", partial)
        return partial
    return result
