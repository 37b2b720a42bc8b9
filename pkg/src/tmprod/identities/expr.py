"""Closed-form expressions for expected values.

Grammar (whitespace is insignificant)::

    expr     := term (('+' | '-') term)*
    term     := factor (('*' | '/') factor)*
    factor   := base ('^' '(' rational ')' | '^' integer)?
    base     := rational | const | func '(' expr ')' | '(' expr ')'
    const    := 'pi' | 'gamma' | 'gamma_quarter'
    func     := 'sqrt' | 'exp' | 'ln' | 'sinh' | 'cosh' | 'sin' | 'cos'
    rational := integer ('/' positive-integer)?

A literal ``p/q`` is read greedily as one rational, so ``pi/2/3`` is pi/(2/3).
Exponents may carry a leading minus sign (``2^(-2/5)``, ``x^-1``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from ..numeric import (BoundedReal, NumericContext, const_euler_gamma, const_gamma_quarter, const_pi, elem_fn,
                       power)

CONSTANTS = ("pi", "gamma", "gamma_quarter")
FUNCTIONS = ("sqrt", "exp", "ln", "sinh", "cosh", "sin", "cos")


class ExprSyntaxError(SyntaxError):
    def __init__(self, position: int, expected, text: str = ""):
        self.position = position
        self.expected = tuple(sorted(expected))
        super().__init__(f"at offset {position}: expected one of {', '.join(self.expected)}"
                         + (f" in {text!r}" if text else ""))


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction


Expr = Num | Const | Func | BinOp | Pow


# -- parsing -----------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, expected):
        self.skip()
        raise ExprSyntaxError(self.pos, expected, self.text)

    def expect(self, ch: str):
        if self.peek() != ch:
            self.fail({repr(ch)})
        self.pos += 1

    def integer(self, signed: bool = False) -> int:
        sign = 1
        if signed and self.peek() == "-":
            self.pos += 1
            sign = -1
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail({"integer"})
        return sign * int(self.text[start:self.pos])

    def rational(self, signed: bool = False) -> Fraction:
        p = self.integer(signed)
        if self.peek() == "/":
            save = self.pos
            self.pos += 1
            if not self.peek().isdigit():
                # the slash belongs to the enclosing term
                self.pos = save
                return Fraction(p)
            q = self.integer()
            if q == 0:
                self.pos -= 1
                self.fail({"positive integer"})
            return Fraction(p, q)
        return Fraction(p)

    def word(self) -> str:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalpha() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]

    def expr(self) -> Expr:
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        node = self.base()
        if self.peek() == "^":
            self.pos += 1
            ch = self.peek()
            if ch == "(":
                self.pos += 1
                exponent = self.rational(signed=True)
                self.expect(")")
            elif ch.isdigit() or ch == "-":
                exponent = Fraction(self.integer(signed=True))
            else:
                self.fail({"'('", "integer"})
            node = Pow(node, exponent)
        return node

    def base(self) -> Expr:
        ch = self.peek()
        if ch.isdigit():
            return Num(self.rational())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        start = self.pos
        name = self.word()
        if name in CONSTANTS:
            return Const(name)
        if name in FUNCTIONS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Func(name, arg)
        self.pos = start
        self.fail({"rational", "'('", *CONSTANTS, *FUNCTIONS})


def parse_closed_form(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    if p.peek():
        p.fail({"'+'", "'-'", "'*'", "'/'", "end of input"})
    return node


# -- printing ----------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Num) and node.value.denominator != 1:
        return 2
    return 3


def to_text(node: Expr) -> str:
    """Print an expression so that parse_closed_form(to_text(e)) == e."""
    if isinstance(node, Num):
        return _fmt_rational(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Func):
        return f"{node.name}({to_text(node.arg)})"
    if isinstance(node, Pow):
        inner = to_text(node.base)
        if _prec(node.base) < 3 or isinstance(node.base, Pow):
            inner = f"({inner})"
        e = node.exponent
        exp_text = str(e.numerator) if e.denominator == 1 and e >= 0 else f"({_fmt_rational(e)})"
        return f"{inner}^{exp_text}"
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    # left-associative: an equal-precedence right operand needs parentheses
    if _prec(node.right) < p or (_prec(node.right) == p and isinstance(node.right, BinOp)):
        right = f"({right})"
    if node.op == "/" and left[-1].isdigit() and right[0].isdigit():
        # "a/b" between two integer literals would read back as one rational
        left = f"({left})"
    return f"{left}{node.op}{right}"


# -- evaluation --------------------------------------------------------------------

def evaluate(ctx: NumericContext, node: Expr) -> BoundedReal:
    """Ball value of an expression; raises Unavailable / DomainError from numeric."""
    if isinstance(node, Num):
        return BoundedReal.exact(ctx, node.value)
    if isinstance(node, Const):
        return {"pi": const_pi, "gamma": const_euler_gamma, "gamma_quarter": const_gamma_quarter}[node.name](ctx)
    if isinstance(node, Func):
        return elem_fn(ctx, node.name, evaluate(ctx, node.arg))
    if isinstance(node, Pow):
        return power(ctx, evaluate(ctx, node.base), node.exponent)
    left, right = evaluate(ctx, node.left), evaluate(ctx, node.right)
    return {"+": left.__add__, "-": left.__sub__, "*": left.__mul__, "/": left.__truediv__}[node.op](right)


def constants_used(node: Expr) -> set[str]:
    if isinstance(node, Const):
        return {node.name}
    if isinstance(node, Func):
        return constants_used(node.arg)
    if isinstance(node, Pow):
        return constants_used(node.base)
    if isinstance(node, BinOp):
        return constants_used(node.left) | constants_used(node.right)
    return set()


# -- monomial canonical form -------------------------------------------------------

def _prime_factors(n: int) -> Counter:
    out, p = Counter(), 2
    while p * p <= n:
        while n % p == 0:
            out[p] += 1
            n //= p
        p += 1
    if n > 1:
        out[n] += 1
    return out


@dataclass(frozen=True)
class Monomial:
    """coefficient * prod(atom ** exponent); prime atoms keep exponents in (0, 1)."""

    coefficient: Fraction
    factors: tuple

    def __str__(self) -> str:
        parts = [] if self.coefficient == 1 else [_fmt_rational(self.coefficient)]
        for atom, e in self.factors:
            parts.append(atom if e == 1 else f"{atom}^({_fmt_rational(e)})")
        return "*".join(parts) or "1"


def _mono_mul(a: tuple, b: tuple, sign: int = 1) -> tuple:
    coef_a, fa = a
    coef_b, fb = b
    out = Counter(fa)
    for k, e in fb.items():
        out[k] += sign * e
    return coef_a * coef_b ** sign, out


def _mono(node: Expr):
    if isinstance(node, Num):
        return node.value, Counter()
    if isinstance(node, Const):
        return Fraction(1), Counter({node.name: Fraction(1)})
    if isinstance(node, Func):
        if node.name == "sqrt":
            return _mono(Pow(node.arg, Fraction(1, 2)))
        inner = monomial(node.arg)
        if inner is None:
            return None
        return Fraction(1), Counter({f"{node.name}({inner})": Fraction(1)})
    if isinstance(node, Pow):
        base = _mono(node.base)
        if base is None:
            return None
        coef, f = base
        e = node.exponent
        out = Counter({k: v * e for k, v in f.items()})
        if e.denominator == 1:
            return coef ** int(e), out
        if coef <= 0:
            return None
        for p, k in _prime_factors(coef.numerator).items():
            out[str(p)] += k * e
        for p, k in _prime_factors(coef.denominator).items():
            out[str(p)] -= k * e
        return Fraction(1), out
    if node.op in ("*", "/"):
        left, right = _mono(node.left), _mono(node.right)
        if left is None or right is None or (node.op == "/" and right[0] == 0):
            return None
        return _mono_mul(left, right, 1 if node.op == "*" else -1)
    return None


def monomial(node: Expr) -> Monomial | None:
    """Exact canonical form of a product/quotient/power of atoms, or None for sums."""
    m = _mono(node)
    if m is None:
        return None
    coef, f = m
    factors = []
    for atom, e in f.items():
        if atom.isdigit():
            whole = e.numerator // e.denominator
            coef *= Fraction(int(atom)) ** whole
            e -= whole
        if e:
            factors.append((atom, e))
    return Monomial(coef, tuple(sorted(factors)))


def same_monomial(a: Expr, b: Expr) -> bool:
    ma, mb = monomial(a), monomial(b)
    return ma is not None and ma == mb
