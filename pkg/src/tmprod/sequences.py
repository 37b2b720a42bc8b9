"""Thue-Morse type weight sequences.

A :class:`WeightFamily` is a multiplicatively ``B``-automatic sequence:
``w(0) = seed`` and ``w(B*n + j) = mu[j] * w(n)`` for ``B*n + j > 0``.
Unrolling gives ``w(n) = seed * prod(mu[d] for d in digits(n))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache


def epsilon(n: int) -> int:
    """The +-1 Thue-Morse sequence: (-1) ** (number of ones in binary n)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return -1 if n.bit_count() & 1 else 1


def zero_one_t(n: int) -> int:
    """The 0/1 Thue-Morse sequence t_n = (1 - epsilon(n)) / 2."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return n.bit_count() & 1


def digits(n: int, base: int) -> list[int]:
    """Base-``base`` digits of ``n``, least significant first (empty for 0)."""
    out = []
    while n:
        n, d = divmod(n, base)
        out.append(d)
    return out


@dataclass(frozen=True)
class WeightFamily:
    base: int
    multipliers: tuple
    seed: Fraction = Fraction(1)
    name: str = ""

    def __post_init__(self):
        mu = tuple(Fraction(m) for m in self.multipliers)
        object.__setattr__(self, "multipliers", mu)
        object.__setattr__(self, "seed", Fraction(self.seed))
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if len(mu) != self.base:
            raise ValueError(f"need {self.base} multipliers, got {len(mu)}")
        if mu[0] != 1:
            raise ValueError("mu_0 must be 1")

    @classmethod
    def epsilon(cls) -> "WeightFamily":
        return cls(2, (1, -1), name="epsilon")

    @classmethod
    def ones_base(cls, base: int) -> "WeightFamily":
        """(-1) ** (number of digits equal to 1 in the base-``base`` expansion)."""
        mu = [1] * base
        mu[1] = -1
        return cls(base, tuple(mu), name=f"ones_base:{base}")

    @classmethod
    def geometric(cls, ratio) -> "WeightFamily":
        ratio = Fraction(ratio)
        return cls(2, (1, ratio), name=f"geometric:{ratio}")

    @property
    def multiplier_sum(self) -> Fraction:
        return sum(self.multipliers, Fraction(0))

    @property
    def abs_multiplier_sum(self) -> Fraction:
        return sum((abs(m) for m in self.multipliers), Fraction(0))

    @property
    def mean_zero(self) -> bool:
        return self.multiplier_sum == 0

    @property
    def is_epsilon_like(self) -> bool:
        """Base 2 with mu = (1, -1): a rational multiple of epsilon."""
        return self.base == 2 and self.multipliers[1] == -1

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        mu = ",".join(str(m) for m in self.multipliers)
        return f"family(base={self.base}, mu=({mu}), seed={self.seed})"

    def __call__(self, n: int) -> Fraction:
        return weight_eval(self, n)

    def relative(self, j: int, length: int) -> Fraction:
        """prod(mu[d]) over the ``length`` low digits of ``j`` (the in-block weight)."""
        w = Fraction(1)
        for _ in range(length):
            j, d = divmod(j, self.base)
            w *= self.multipliers[d]
        return w


def weight_eval(fam: WeightFamily, n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be non-negative")
    w = fam.seed
    mu = fam.multipliers
    while n:
        n, d = divmod(n, fam.base)
        w *= mu[d]
    return w


@lru_cache(maxsize=64)
def block_pattern(fam: WeightFamily, depth: int) -> tuple:
    """In-block weights prod(mu[d]) for j in [0, B**depth)."""
    pattern = (Fraction(1),)
    for _ in range(depth):
        pattern = tuple(w * m for m in fam.multipliers for w in pattern)
    return pattern


def partial_weight_sum(fam: WeightFamily, N: int) -> Fraction:
    """Exact sum of w(n) for 0 <= n < N, by a digit walk (O(B log N))."""
    if N < 0:
        raise ValueError("N must be non-negative")
    ds = digits(N, fam.base)
    total = Fraction(0)
    prefix = Fraction(1)
    block = fam.multiplier_sum
    for i in range(len(ds) - 1, -1, -1):
        full = block ** i
        for t in range(ds[i]):
            total += prefix * fam.multipliers[t] * full
        prefix *= fam.multipliers[ds[i]]
    return fam.seed * total


class ZeroOneTM:
    """Marker weight for the 0/1 Thue-Morse sequence t_n."""

    label = "zero_one_tm"

    def __call__(self, n: int) -> int:
        return zero_one_t(n)

    def __eq__(self, other):
        return isinstance(other, ZeroOneTM)

    def __hash__(self):
        return hash("zero_one_tm")

    def __repr__(self):
        return "ZeroOneTM()"


class ConstantOne:
    """Marker weight w(n) = 1 (plain, unweighted products)."""

    label = "one"

    def __call__(self, n: int) -> int:
        return 1

    def __eq__(self, other):
        return isinstance(other, ConstantOne)

    def __hash__(self):
        return hash("one")

    def __repr__(self):
        return "ConstantOne()"


Weight = WeightFamily | ZeroOneTM | ConstantOne


def parse_weight(text: str) -> Weight:
    """Registry weight names: epsilon, ones_base:B, zero_one_tm, geometric:p/q, one."""
    text = text.strip()
    if text == "epsilon":
        return WeightFamily.epsilon()
    if text == "zero_one_tm":
        return ZeroOneTM()
    if text == "one":
        return ConstantOne()
    kind, _, arg = text.partition(":")
    if kind == "ones_base" and arg:
        return WeightFamily.ones_base(int(arg))
    if kind == "geometric" and arg:
        return WeightFamily.geometric(Fraction(arg))
    raise ValueError(f"unknown weight family {text!r}")


def weight_label(w: Weight) -> str:
    return w.label
