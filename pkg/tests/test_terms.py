import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from conftest import to_fraction
from tmprod.evaluator import lemma_term
from tmprod.identities import catalog
from tmprod.numeric import DomainError, NumericContext
from tmprod.sequences import WeightFamily, epsilon
from tmprod.terms import (Convergence, FactoredTerm, IndexBelowStart, LinearFactor, LogTerm, NotBalanced, classify,
                          logterm_deriv_bound, logterm_eval, pair_logterm, pair_logterm_depth, term_eval_rational,
                          to_logterm)

EPS = WeightFamily.epsilon()
WR = FactoredTerm.from_triples([(2, 1, 1), (2, 2, -1)], 0)


def eps_terms():
    """Single products with an epsilon weight from the built-in catalogue."""
    out = []
    for e in catalog():
        if e.is_double or getattr(e.spec.weight, "label", None) != "epsilon":
            continue
        if e.spec.term.balanced:
            out.append(pytest.param(e.spec.term, id=e.id))
    return out


def test_lemma_term_example():
    assert term_eval_rational(lemma_term(0, 1), 1) == Fraction(9, 16)


def test_woods_robbins_first_factor():
    assert term_eval_rational(WR, 0) == Fraction(1, 2)


def test_equal_parameters_give_one():
    t = lemma_term(Fraction(3, 2), Fraction(3, 2))
    assert all(term_eval_rational(t, n) == 1 for n in range(1, 30))


def test_index_below_start():
    with pytest.raises(IndexBelowStart):
        term_eval_rational(lemma_term(0, 1), 0)


@pytest.mark.parametrize("triples,kind,c1", [
    ([(2, 1, 1), (2, 2, -1)], Convergence.CONDITIONAL, Fraction(-1, 2)),
    ([(4, 1, 1), (4, 2, 1), (4, 0, -1), (4, 3, -1)], Convergence.ABSOLUTE, Fraction(0)),
    ([(1, 0, 1), (1, 2, -1)], Convergence.CONDITIONAL, Fraction(-2)),
    ([(1, 1, 1), (2, 1, -1)], Convergence.DIVERGENT, None),
])
def test_classify_examples(triples, kind, c1):
    got_kind, got_c1 = classify(FactoredTerm.from_triples(triples, 1))
    assert got_kind is kind
    if c1 is not None:
        assert got_c1 == c1


def test_c1_matches_large_n_expansion():
    # n * ln f(n) -> c1 as n grows
    for t in (WR.with_start(1), lemma_term(0, 1), lemma_term(2, 7)):
        _, c1 = classify(t)
        with mpmath.workdps(60):
            n = mpmath.mpf(10) ** 20
            f = mpmath.mpf(1)
            for fac, e in t.factors:
                f *= (fac.alpha * n + fac.beta) ** e
            assert abs(n * mpmath.log(f) - c1) < 1e-15


@given(st.integers(0, 40))
def test_balance_is_shift_invariant(s):
    for triples in ([(2, 1, 1), (2, 2, -1)], [(1, 1, 1), (2, 1, -1)], [(4, 1, 1), (4, 3, -1), (2, 1, 1), (2, 2, -1)]):
        t = FactoredTerm.from_triples(triples, 1)
        shifted = FactoredTerm(tuple((LinearFactor(f.alpha, f.beta + f.alpha * s), e) for f, e in t.factors), 1)
        assert shifted.balanced == t.balanced


def test_to_logterm_woods_robbins():
    L = to_logterm(WR)
    assert L.combination == ((Fraction(1), LinearFactor(2, 1)), (Fraction(-1), LinearFactor(2, 2)))


def test_to_logterm_rejects_unbalanced():
    with pytest.raises(NotBalanced):
        to_logterm(FactoredTerm.from_triples([(1, 1, 1), (2, 1, -1)], 1))


def test_equal_lemma_term_has_empty_log():
    assert to_logterm(lemma_term(5, 5)).is_empty


@pytest.mark.parametrize("t", [WR, lemma_term(0, 1), lemma_term(Fraction(1, 3), 4),
                               FactoredTerm.from_triples([(4, 1, 1), (4, 2, 1), (4, 0, -1), (4, 3, -1)], 1)])
def test_exp_of_log_contains_rational_value(t):
    ctx = NumericContext(128)
    L = to_logterm(t)
    for n in range(t.n0, t.n0 + 101):
        ball = logterm_eval(ctx, L, n)
        truth = term_eval_rational(t, n)
        with mpmath.workdps(60):
            lo = mpmath.exp(mpmath.mpf(to_fraction(ball.lower).numerator) / to_fraction(ball.lower).denominator)
            hi = mpmath.exp(mpmath.mpf(to_fraction(ball.upper).numerator) / to_fraction(ball.upper).denominator)
            # mpmath rounding at 60 digits is far below the 128-bit ball width
            slack = mpmath.mpf(10) ** -55
            assert lo - slack <= mpmath.mpf(truth.numerator) / truth.denominator <= hi + slack


def test_empty_logterm_evaluates_to_zero():
    r = logterm_eval(NumericContext(64), LogTerm(()), 3)
    assert r.value == 0 and r.abs_error == 0


def test_woods_robbins_log_at_zero():
    ctx = NumericContext(128)
    with mpmath.workdps(60):
        assert logterm_eval(ctx, to_logterm(WR), 0).contains(to_fraction(mpmath.log(mpmath.mpf(1) / 2)))


def test_pair_woods_robbins():
    P = pair_logterm(to_logterm(WR), EPS)
    expected = LogTerm(((1, LinearFactor(4, 1)), (-1, LinearFactor(4, 2)), (-1, LinearFactor(4, 3)),
                        (1, LinearFactor(4, 4))), 0)
    assert P == expected


def test_pair_empty_is_empty():
    assert pair_logterm(LogTerm(()), EPS).is_empty


def weighted_product(t: FactoredTerm, start: int, stop: int) -> Fraction:
    out = Fraction(1)
    for n in range(start, stop):
        out *= term_eval_rational(t, n) ** epsilon(n)
    return out


def paired_product(Ld: LogTerm, start: int, stop: int) -> Fraction:
    out = Fraction(1)
    for k in range(start, stop):
        out *= Ld.exact_factor_value(k) ** epsilon(k)
    return out


@pytest.mark.parametrize("t", eps_terms())
@pytest.mark.parametrize("d", [1, 3, 6])
def test_pairing_is_exact_on_aligned_blocks(t, d):
    # integer coefficients, so both sides are exact rationals
    Ld = pair_logterm_depth(to_logterm(t), EPS, d)
    k0 = max(Ld.k0, 1) if t.n0 > 0 else Ld.k0
    K = 64 if d <= 3 else k0 + 2
    assert weighted_product(t, 2 ** d * k0, 2 ** d * K) == paired_product(Ld, k0, K)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 30), st.integers(0, 30), st.integers(1, 4))
def test_pairing_identity_for_lemma_terms(a, b, d):
    t = lemma_term(a, b)
    Ld = pair_logterm_depth(to_logterm(t), EPS, d)
    k0 = max(Ld.k0, 1)
    assert weighted_product(t, 2 ** d * k0, 2 ** d * (k0 + 5)) == paired_product(Ld, k0, k0 + 5)


def test_deriv_bound_examples():
    assert logterm_deriv_bound(LogTerm(((1, LinearFactor(1, 0)),), 1), 1, 10) == Fraction(1, 10)
    L = to_logterm(FactoredTerm.from_triples([(2, 1, 1), (2, 2, -1)], 0))
    assert logterm_deriv_bound(L, 2, 100) == Fraction(4, 201 ** 2) + Fraction(4, 202 ** 2)


def test_deriv_bound_domain():
    L = LogTerm(((1, LinearFactor(1, 0)),), 1)
    with pytest.raises(DomainError):
        logterm_deriv_bound(L, 1, 0)


def random_logterm(rng: random.Random) -> LogTerm:
    combo = []
    for _ in range(rng.randint(1, 4)):
        combo.append((rng.randint(-3, 3) or 1, LinearFactor(rng.randint(1, 8), rng.randint(0, 10))))
    return LogTerm(tuple(combo), 1)


def log_derivative(L: LogTerm, r: int, x):
    """r-th derivative of L at x in mpmath (r = 0 is L itself)."""
    if r == 0:
        return sum(c.numerator * mpmath.log(f.alpha * x + f.beta) / c.denominator for c, f in L.combination)
    return sum((-1) ** (r - 1) * math.factorial(r - 1) * (c.numerator / mpmath.mpf(c.denominator))
               * mpmath.mpf(f.alpha) ** r / (f.alpha * x + f.beta) ** r for c, f in L.combination)


def test_deriv_bound_dominates_finite_differences():
    rng = random.Random(7)
    with mpmath.workdps(80):
        h = mpmath.mpf(10) ** -20
        for _ in range(100):
            L = random_logterm(rng)
            d = rng.randint(1, 6)
            x = rng.randint(2, 200)
            fd = (log_derivative(L, d - 1, x + h) - log_derivative(L, d - 1, x - h)) / (2 * h)
            bound = logterm_deriv_bound(L, d, Fraction(x) - Fraction(1, 10 ** 20))
            assert abs(fd) <= mpmath.mpf(bound.numerator) / bound.denominator


def chained_difference(L: LogTerm, d: int, x: int):
    """Delta_{2^(d-1)} ... Delta_1 L at x, each Delta_h g(x) = g(x + h) - g(x)."""
    def g(level, y):
        if level == 0:
            return log_derivative(L, 0, y)
        h = 2 ** (level - 1)
        return g(level - 1, y + h) - g(level - 1, y)
    return g(d, x)


@pytest.mark.parametrize("t", [WR.with_start(1), lemma_term(0, 1), lemma_term(3, 11)])
@pytest.mark.parametrize("d", range(1, 7))
def test_paired_term_is_chained_difference(t, d):
    L = to_logterm(t)
    Ld = pair_logterm_depth(L, EPS, d)
    ctx = NumericContext(200)
    with mpmath.workdps(70):
        for k in (max(Ld.k0, 1), 5, 40):
            direct = logterm_eval(ctx, Ld, k)
            chain = (-1) ** d * chained_difference(L, d, 2 ** d * k)
            # 2^d terms in mpmath at 70 digits vs a 200-bit ball
            assert abs(mpmath.mpf(str(direct.value)) - chain) < mpmath.mpf(10) ** -50
            bound = 2 ** (d * (d - 1) // 2) * logterm_deriv_bound(L, d, 2 ** d * k)
            assert abs(to_fraction(direct.value)) <= bound + to_fraction(direct.abs_error)
