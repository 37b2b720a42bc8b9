"""Ball arithmetic over MPFR.

A :class:`BoundedReal` is a midpoint (an ``mpfr`` at the working precision) and
a radius (an ``mpfr`` at :data:`ERR_PREC` bits).  Midpoints come from MPFR's
correctly rounded operations; radii are always computed with upward rounding so
that every reported radius is a true upper bound on the distance to the exact
value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import gmpy2
from gmpy2 import mpfr, mpq, mpz

ERR_PREC = 64

_UP = gmpy2.context(precision=ERR_PREC, round=gmpy2.RoundUp)
_DOWN = gmpy2.context(precision=ERR_PREC, round=gmpy2.RoundDown)
_ZERO = mpfr(0)


class DomainError(ValueError):
    """An operand ball is not inside the domain of the function."""


class Unavailable(LookupError):
    """A configured constant is missing or not precise enough."""


@lru_cache(maxsize=None)
def _mp(precision: int) -> gmpy2.context:
    return gmpy2.context(precision=precision)


def _up(x) -> mpfr:
    return _UP.plus(x)


def _down(x) -> mpfr:
    return _DOWN.plus(x)


def _round_term(r: mpfr, prec: int) -> mpfr:
    """Upper bound for the rounding error of a correctly rounded result."""
    if r == 0:
        return _ZERO
    return _UP.mul_2exp(_UP.abs(r), 2 - prec)


@dataclass(frozen=True)
class NumericContext:
    precision_bits: int = 128
    guard_bits: int = 0
    constants: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.guard_bits < 0 or self.guard_bits >= self.precision_bits:
            raise ValueError("guard_bits must be in [0, precision_bits)")

    @cached_property
    def mp(self) -> gmpy2.context:
        return _mp(self.precision_bits)

    @property
    def requested_digits(self) -> int:
        return math.ceil((self.precision_bits - self.guard_bits) * math.log10(2))

    def with_precision(self, precision_bits: int, guard_bits: int | None = None) -> "NumericContext":
        return NumericContext(precision_bits, self.guard_bits if guard_bits is None else guard_bits,
                              self.constants)

    @classmethod
    def for_digits(cls, digits: int, guard_bits: int = 32, constants: dict | None = None) -> "NumericContext":
        bits = math.ceil(digits * math.log2(10)) + guard_bits
        return cls(max(64, bits), guard_bits, dict(constants or {}))


@dataclass(frozen=True)
class BoundedReal:
    value: mpfr
    abs_error: mpfr = _ZERO

    def __post_init__(self):
        if self.abs_error < 0:
            raise ValueError("abs_error must be non-negative")

    # -- construction -------------------------------------------------------

    @classmethod
    def exact(cls, ctx: NumericContext, q) -> "BoundedReal":
        """Ball around the rational ``q`` whose radius is the exact conversion error."""
        q = mpq(q.numerator, q.denominator) if isinstance(q, Fraction) else mpq(q)
        v = mpfr(q, ctx.precision_bits)
        err = abs(mpq(v) - q)
        return cls(v, _up(err) if err else _ZERO)

    @classmethod
    def from_decimal(cls, ctx: NumericContext, text: str, stated_error: Fraction = Fraction(0)) -> "BoundedReal":
        ball = cls.exact(ctx, Fraction(text.strip()))
        if stated_error:
            ball = ball.widen(_up(mpq(stated_error.numerator, stated_error.denominator)))
        return ball

    @classmethod
    def quotient(cls, ctx: NumericContext, num: int, den: int) -> "BoundedReal":
        """Correctly rounded num/den for (possibly huge) integers."""
        if den == 1:
            return cls.exact(ctx, mpz(num))
        num, den = mpz(num), mpz(den)
        # floor(num * 2**s / den) carries prec + 4 bits; its error is below 2**-s
        s = ctx.precision_bits + 4 - (num.bit_length() - den.bit_length())
        q = (num << s) // den if s >= 0 else num // (den << -s)
        v = ctx.mp.mul_2exp(mpfr(q, ctx.precision_bits), -s)
        chop = _UP.mul_2exp(mpfr(1), -s)
        return cls(v, _UP.add(chop, _round_term(v, ctx.precision_bits)))

    def widen(self, extra) -> "BoundedReal":
        return BoundedReal(self.value, _UP.add(self.abs_error, _up(extra)))

    # -- queries ------------------------------------------------------------

    @property
    def precision(self) -> int:
        return self.value.precision

    @property
    def lower(self) -> mpfr:
        return _DOWN.sub(_down(self.value), self.abs_error)

    @property
    def upper(self) -> mpfr:
        return _UP.add(_up(self.value), self.abs_error)

    def contains(self, q) -> bool:
        """Exact containment test for a rational (or mpfr) point."""
        q = mpq(q.numerator, q.denominator) if isinstance(q, Fraction) else mpq(q)
        return abs(mpq(self.value) - q) <= mpq(self.abs_error)

    def overlaps(self, other: "BoundedReal", slack=0) -> bool:
        gap = abs(mpq(self.value) - mpq(other.value))
        return gap <= mpq(self.abs_error) + mpq(other.abs_error) + mpq(slack)

    def __repr__(self) -> str:
        return f"BoundedReal({self.value} +/- {float(self.abs_error):.3g})"

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "BoundedReal":
        if isinstance(other, BoundedReal):
            return other
        if isinstance(other, (int, Fraction)) or type(other).__name__ in ("mpz", "mpq"):
            return BoundedReal.exact(NumericContext(max(64, self.precision)), other)
        return NotImplemented

    def __neg__(self) -> "BoundedReal":
        # plain unary minus would round to the global 53-bit context
        return BoundedReal(_mp(self.precision).minus(self.value), self.abs_error)

    def __add__(self, other) -> "BoundedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.precision, other.precision)
        r = _mp(prec).add(self.value, other.value)
        err = _UP.add(_UP.add(self.abs_error, other.abs_error), _round_term(r, prec))
        return BoundedReal(r, err)

    __radd__ = __add__

    def __sub__(self, other) -> "BoundedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "BoundedReal":
        return (-self) + other

    def __mul__(self, other) -> "BoundedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.precision, other.precision)
        r = _mp(prec).mul(self.value, other.value)
        ea, eb = self.abs_error, other.abs_error
        err = _UP.add(_UP.mul(_UP.abs(self.value), eb), _UP.mul(_UP.abs(other.value), ea))
        err = _UP.add(err, _UP.mul(ea, eb))
        return BoundedReal(r, _UP.add(err, _round_term(r, prec)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BoundedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = max(self.precision, other.precision)
        b_lo = _DOWN.sub(_DOWN.abs(other.value), other.abs_error)
        if b_lo <= 0:
            raise DomainError("division by a ball containing zero")
        r = _mp(prec).div(self.value, other.value)
        num = _UP.add(_UP.mul(_UP.abs(self.value), other.abs_error),
                      _UP.mul(_UP.abs(other.value), self.abs_error))
        den = _DOWN.mul(_DOWN.abs(other.value), b_lo)
        return BoundedReal(r, _UP.add(_UP.div(num, den), _round_term(r, prec)))

    def __rtruediv__(self, other) -> "BoundedReal":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int) -> "BoundedReal":
        if not isinstance(k, int):
            raise TypeError("use power() for non-integer exponents")
        if k < 0:
            return BoundedReal.exact(NumericContext(max(64, self.precision)), 1) / (self ** (-k))
        result = BoundedReal.exact(NumericContext(max(64, self.precision)), 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, q) -> "BoundedReal":
        """Multiply by an exact rational."""
        q = Fraction(q)
        if q.denominator == 1:
            return self * q.numerator
        return self * q.numerator / q.denominator


def const_pi(ctx: NumericContext) -> BoundedReal:
    v = ctx.mp.const_pi()
    return BoundedReal(v, _round_term(v, ctx.precision_bits))


def const_euler_gamma(ctx: NumericContext) -> BoundedReal:
    v = ctx.mp.const_euler()
    return BoundedReal(v, _round_term(v, ctx.precision_bits))


def _significant_digits(text: str) -> tuple[int, int]:
    """Return (significant digits, digits after the decimal point)."""
    body = text.strip().lstrip("+-")
    if "e" in body.lower():
        raise ValueError("configured constants must be plain decimals")
    whole, _, frac = body.partition(".")
    digits = (whole + frac).lstrip("0")
    return len(digits), len(frac)


def const_gamma_quarter(ctx: NumericContext) -> BoundedReal:
    """Gamma(1/4) from the configured decimal string ``ctx.constants['gamma_quarter']``.

    The string is trusted to one unit in its last place.  Raises
    :class:`Unavailable` when it is missing or shorter than the context's
    requested accuracy.
    """
    text = ctx.constants.get("gamma_quarter")
    if text is None:
        raise Unavailable("gamma_quarter is not configured")
    sig, frac = _significant_digits(text)
    if sig < ctx.requested_digits:
        raise Unavailable(f"gamma_quarter has {sig} digits, {ctx.requested_digits} requested")
    return BoundedReal.from_decimal(ctx, text, Fraction(1, 10 ** frac))


def _exp(ctx, x: BoundedReal) -> BoundedReal:
    r = ctx.mp.exp(x.value)
    err = _UP.mul(_UP.exp(_UP.add(_up(x.value), x.abs_error)), x.abs_error) if x.abs_error else _ZERO
    return BoundedReal(r, _UP.add(err, _round_term(r, ctx.precision_bits)))


def _ln(ctx, x: BoundedReal) -> BoundedReal:
    lo = x.lower
    if lo <= 0:
        raise DomainError(f"ln of a ball reaching {float(lo):.3g}")
    r = ctx.mp.log(x.value)
    err = _UP.div(x.abs_error, lo) if x.abs_error else _ZERO
    return BoundedReal(r, _UP.add(err, _round_term(r, ctx.precision_bits)))


def _sqrt(ctx, x: BoundedReal) -> BoundedReal:
    if x.lower < 0:
        raise DomainError("sqrt of a ball reaching below zero")
    r = ctx.mp.sqrt(x.value)
    err = _ZERO
    if x.abs_error:
        err = _UP.sqrt(x.abs_error)
        if x.value > 0:
            err = min(err, _UP.div(x.abs_error, _DOWN.sqrt(_down(x.value))))
    return BoundedReal(r, _UP.add(err, _round_term(r, ctx.precision_bits)))


def _lipschitz(fn):
    def apply(ctx, x: BoundedReal) -> BoundedReal:
        r = getattr(ctx.mp, fn)(x.value)
        return BoundedReal(r, _UP.add(x.abs_error, _round_term(r, ctx.precision_bits)))
    return apply


def _hyperbolic(fn, deriv):
    def apply(ctx, x: BoundedReal) -> BoundedReal:
        r = getattr(ctx.mp, fn)(x.value)
        err = _ZERO
        if x.abs_error:
            reach = _UP.add(_UP.abs(x.value), x.abs_error)
            err = _UP.mul(_UP.abs(getattr(_UP, deriv)(reach)), x.abs_error)
        return BoundedReal(r, _UP.add(err, _round_term(r, ctx.precision_bits)))
    return apply


_ELEMENTARY = {
    "exp": _exp,
    "ln": _ln,
    "sqrt": _sqrt,
    "sin": _lipschitz("sin"),
    "cos": _lipschitz("cos"),
    "sinh": _hyperbolic("sinh", "cosh"),
    "cosh": _hyperbolic("cosh", "sinh"),
}

ELEMENTARY_FUNCTIONS = tuple(_ELEMENTARY)


def elem_fn(ctx: NumericContext, name: str, x: BoundedReal) -> BoundedReal:
    try:
        fn = _ELEMENTARY[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}") from None
    return fn(ctx, x)


def power(ctx: NumericContext, x: BoundedReal, exponent) -> BoundedReal:
    """``x ** exponent`` for a rational exponent (positive base unless integral)."""
    exponent = Fraction(exponent)
    if exponent.denominator == 1:
        return x ** exponent.numerator
    return _exp(ctx, _ln(ctx, x).scale(exponent))


def ln_ball(ctx: NumericContext, x: BoundedReal) -> BoundedReal:
    return _ln(ctx, x)


def ln_int(ctx: NumericContext, n) -> BoundedReal:
    """ln of a positive integer, exact input."""
    if n <= 0:
        raise DomainError(f"ln of non-positive integer {n}")
    return _ln(ctx, BoundedReal.exact(ctx, mpz(n)))


def ln_rational(ctx: NumericContext, q) -> BoundedReal:
    q = Fraction(q)
    if q <= 0:
        raise DomainError(f"ln of non-positive rational {q}")
    if q.denominator == 1:
        return ln_int(ctx, q.numerator)
    return ln_int(ctx, q.numerator) - ln_int(ctx, q.denominator)


# -- exact decimal printing ------------------------------------------------------

def _to_fraction(x) -> Fraction:
    q = mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def _decimal_exponent(q: Fraction) -> int:
    """floor(log10(q)) for q > 0, computed exactly."""
    e = len(str(q.numerator)) - len(str(q.denominator))
    while Fraction(10) ** e > q:
        e -= 1
    while Fraction(10) ** (e + 1) <= q:
        e += 1
    return e


def truncate_decimal(q: Fraction, significant: int) -> tuple[str, Fraction]:
    """Truncate ``q`` toward zero to ``significant`` digits.

    Returns the decimal string and the exact truncation error.
    """
    if q == 0:
        return "0", Fraction(0)
    sign = "-" if q < 0 else ""
    a = abs(q)
    e10 = _decimal_exponent(a)
    shift = significant - 1 - e10
    scaled = a * Fraction(10) ** shift
    digits = scaled.numerator // scaled.denominator
    kept = Fraction(digits) / Fraction(10) ** shift
    text = str(digits)
    if shift > 0:
        text = text.rjust(shift + 1, "0")
        text = text[:-shift] + "." + text[-shift:]
    else:
        text = text + "0" * (-shift)
    return sign + text, a - kept


def format_bound(q: Fraction, significant: int = 3) -> str:
    """Scientific-notation upper bound for a non-negative rational (rounded up)."""
    if q <= 0:
        return "0"
    e10 = _decimal_exponent(q)
    shift = significant - 1 - e10
    scaled = q * Fraction(10) ** shift
    mant = -((-scaled.numerator) // scaled.denominator)
    if mant >= 10 ** significant:
        mant = -(-mant // 10)
        e10 += 1
    s = str(mant)
    return f"{s[0]}.{s[1:]}e{e10:+d}" if len(s) > 1 else f"{s}e{e10:+d}"


def format_ball(ball: BoundedReal, significant: int) -> tuple[str, str]:
    """Printed value (truncated) and a rounded-up bound covering the truncation."""
    text, trunc = truncate_decimal(_to_fraction(ball.value), significant)
    return text, format_bound(_to_fraction(ball.abs_error) + trunc)
