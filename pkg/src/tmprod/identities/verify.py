"""Checking catalogued products against their expected closed forms."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction

from ..evaluator import (CERTIFIED, COLLAPSED, DivergentSpec, EvalOptions, EvalResult, PrecisionNotAchieved,
                         eval_double, eval_product, log_product)
from ..evaluator.core import finish, meets_target
from ..numeric import (BoundedReal, DomainError, NumericContext, Unavailable, _to_fraction, const_euler_gamma,
                       format_bound, ln_rational)
from .catalog import IdentityEntry, fm_R_single_spec
from .expr import evaluate, to_text

PASS = "Pass"
FAIL = "Fail"
UNVERIFIABLE = "Unverifiable"

# digits of the expected value beyond the target
EXPECTED_GUARD_DIGITS = 4


@dataclass(frozen=True)
class Verdict:
    id: str
    status: str
    value: str | None = None
    abs_error: str | None = None
    certified: bool = False
    expected: str | None = None
    gap: str | None = None
    reason: str = ""

    def as_dict(self) -> dict:
        return {"id": self.id, "status": self.status, "value": self.value, "abs_error": self.abs_error,
                "certified": self.certified, "expected": self.expected, "gap": self.gap, "reason": self.reason}


def evaluate_entry(entry: IdentityEntry, opts: EvalOptions, double_mode: str = COLLAPSED,
                   ctx: NumericContext | None = None) -> EvalResult:
    if entry.is_double:
        return eval_double(ctx, entry.spec, opts, double_mode)
    return eval_product(ctx, entry.spec, opts)


def expected_ball(ctx: NumericContext | None, entry: IdentityEntry, digits: int) -> BoundedReal:
    constants = ctx.constants if ctx is not None else {}
    ectx = NumericContext.for_digits(digits + EXPECTED_GUARD_DIGITS, constants=constants)
    return evaluate(ectx, entry.expected)


def verify(ctx: NumericContext | None, entry: IdentityEntry, opts: EvalOptions,
           double_mode: str = COLLAPSED) -> Verdict:
    """Pass iff |value - expected| <= value bound + expected bound + 10^-digits."""
    t = opts.target_digits
    expected_text = None if entry.expected is None else to_text(entry.expected)
    base = Verdict(entry.id, UNVERIFIABLE, expected=expected_text)
    ball_e = None
    if entry.expected is not None:
        try:
            ball_e = expected_ball(ctx, entry, t)
        except Unavailable as exc:
            return replace(base, reason=f"constant unavailable: {exc}")
        except DomainError as exc:
            return replace(base, reason=f"expected value is not defined: {exc}")
    try:
        result = evaluate_entry(entry, opts, double_mode, ctx)
    except DivergentSpec as exc:
        return replace(base, reason=f"product diverges: {exc}")
    except PrecisionNotAchieved as exc:
        if exc.partial is None:
            return replace(base, reason=f"precision not achieved: {exc}")
        result = exc.partial
    base = replace(base, value=result.value, abs_error=result.abs_error, certified=result.certified)
    if ball_e is None:
        return replace(base, reason="no closed form known")
    v, ev = _to_fraction(result.ball.value), _to_fraction(result.ball.abs_error)
    e, ee = _to_fraction(ball_e.value), _to_fraction(ball_e.abs_error)
    gap = abs(v - e)
    allowed = ev + ee + Fraction(1, 10 ** t)
    status = PASS if gap <= allowed else FAIL
    reason = "" if status == PASS else f"expected value {float(e):.6g}, computed {float(v):.6g}"
    return replace(base, status=status, gap=format_bound(gap), reason=reason)


def fm_R(ctx: NumericContext | None, opts: EvalOptions) -> EvalResult:
    return eval_product(ctx, fm_R_single_spec(), opts)


def fm_phi(ctx: NumericContext | None, opts: EvalOptions) -> EvalResult:
    """phi = 2^(-1/2) e^gamma (2/3) R, summed in log space with the R bound carried along."""
    started = time.perf_counter()
    log_r, wctx, certified, depth, terms = log_product(fm_R_single_spec(), opts)
    log_phi = log_r + const_euler_gamma(wctx) + ln_rational(wctx, Fraction(2, 3)) \
        - ln_rational(wctx, 2).scale(Fraction(1, 2))
    result = finish(log_phi, opts, certified, depth, terms, started, wctx)
    if certified and not meets_target(result, opts):
        partial = replace(result, certified=False)
        if opts.mode == CERTIFIED:
            raise PrecisionNotAchieved(f"error {result.abs_error} above 1e-{opts.target_digits}", partial)
        return partial
    return result
