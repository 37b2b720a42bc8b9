import json
from fractions import Fraction
from pathlib import Path

import gmpy2
import mpmath
import pytest

ORACLES = json.loads((Path(__file__).parent / "data" / "oracles.json").read_text())
GAMMA_QUARTER_40 = ORACLES["gamma_quarter"]

# criterion number -> (passed, description); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def to_fraction(x) -> Fraction:
    """Exact value of an mpmath number, a decimal string or a rational."""
    if isinstance(x, (str, int, Fraction)):
        return Fraction(x)
    if type(x).__name__ in ("mpfr", "mpq", "mpz"):
        q = gmpy2.mpq(x)
        return Fraction(int(q.numerator), int(q.denominator))
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)  # an existing mpf keeps its own precision
    if x == 0:
        return Fraction(0)
    sign, man, exp, _ = x._mpf_
    return (-1) ** sign * Fraction(int(man)) * Fraction(2) ** exp


def gap(result, truth) -> Fraction:
    return abs(Fraction(result.value) - to_fraction(truth))


def within(result, truth, tol) -> bool:
    return gap(result, truth) <= Fraction(tol)


def sound(result, truth) -> bool:
    """|printed value - truth| <= reported abs_error."""
    return gap(result, truth) <= Fraction(result.abs_error)


@pytest.fixture
def hp():
    """mpmath at 80 digits for reference values."""
    with mpmath.workdps(80):
        yield mpmath.mp


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {text}")
