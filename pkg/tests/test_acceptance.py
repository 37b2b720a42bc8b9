"""End-to-end acceptance criteria 1-11, one test each.

Every test records its verdict in ``conftest.ACCEPTANCE``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import mpmath

from conftest import ACCEPTANCE, GAMMA_QUARTER_40, ORACLES, gap, to_fraction
from tmprod.evaluator import (COLLAPSED, DIRECT, EvalOptions, ProductSpec, eval_double, eval_product, lemma_rhs,
                              lemma_term)
from tmprod.evaluator.euler_maclaurin import euler_maclaurin_sum
from tmprod.identities import FAIL, PASS, fm_phi, fm_R, lookup, verify
from tmprod.numeric import NumericContext
from tmprod.polynomials import PolyLogTerm
from tmprod.sequences import WeightFamily

EPS = WeightFamily.epsilon()
rng = random.Random(11)
LEMMA_PAIRS = [(rng.randint(0, 30), rng.randint(0, 30)) for _ in range(100)]


def record(k: int, ok: bool, text: str) -> None:
    ACCEPTANCE[k] = (ok, text)
    assert ok, f"criterion {k}: {text}"


def mp(x):
    return mpmath.mpf(to_fraction(x).numerator) / to_fraction(x).denominator


def single(entry_id, digits):
    return eval_product(None, lookup(entry_id).spec, EvalOptions(digits))


def double(entry_id, digits):
    return eval_double(None, lookup(entry_id).spec, EvalOptions(digits), COLLAPSED)


def lemma(a, b, digits):
    return eval_product(None, ProductSpec(lemma_term(a, b), EPS, 1), EvalOptions(digits))


def test_criterion_01_woods_robbins():
    started = time.perf_counter()
    r = single("woods_robbins", 50)
    elapsed = time.perf_counter() - started
    with mpmath.workdps(120):
        g = gap(r, mpmath.sqrt(2) / 2)
    ok = g <= Fraction(1, 10 ** 50) and elapsed <= 10 and r.certified
    record(1, ok, f"sqrt(2)/2 at 50 digits, gap {float(g):.2e}, {elapsed:.2f} s")


def test_criterion_02_ars_pair():
    quarter = single("ars_quarter", 50)
    unit = single("ars_unit", 40)
    g1, g2 = gap(quarter, Fraction(1, 2)), gap(unit, 1)
    ok = g1 <= Fraction(1, 10 ** 50) and g2 <= Fraction(1, 10 ** 40) and quarter.certified and unit.certified
    record(2, ok, f"1/2 gap {float(g1):.2e}, 1 gap {float(g2):.2e}")


def test_criterion_03_lemma_sweep():
    failures = []
    for a, b in LEMMA_PAIRS:
        r = lemma(a, b, 30)
        if not (r.certified and gap(r, lemma_rhs(a, b)) <= Fraction(1, 10 ** 30)):
            failures.append((a, b))
    # the verify route must agree
    from tmprod.identities.catalog import make_entry
    for a, b in LEMMA_PAIRS[:10]:
        entry = make_entry(f"lemma_{a}_{b}", ProductSpec(lemma_term(a, b), EPS, 1), f"{b + 1}/{a + 1}", "lemma")
        if verify(None, entry, EvalOptions(30)).status != PASS:
            failures.append((a, b, "verify"))
    record(3, not failures, f"100 random (a, b) within 1e-30, failures: {failures or 'none'}")


def test_criterion_04_theorem_one():
    notes, ok = [], True
    with mpmath.workdps(80):
        truths = {"thm1_pi": mpmath.pi / 2, "thm1_sqrt2": mpmath.sqrt(2)}
        for id, truth in truths.items():
            c = double(id, 30)
            ok &= c.certified and gap(c, truth) <= Fraction(1, 10 ** 30)
            errors = []
            for M in (100, 200, 400):
                d = eval_double(None, lookup(id).spec, EvalOptions(12, outer_terms=M, inner_digits=12), DIRECT)
                ok &= d.certified and gap(d, truth) <= Fraction(d.abs_error)
                errors.append(gap(d, truth))
            ok &= errors[0] > errors[1] > errors[2]
            notes.append(f"{id} collapsed gap {float(gap(c, truth)):.1e}, direct gaps "
                         + ", ".join(f"{float(e):.2e}" for e in errors))
    record(4, ok, "; ".join(notes))


def test_criterion_05_corollary():
    cor = double("corollary_pi_sqrt2", 30)
    p, s = double("thm1_pi", 30), double("thm1_sqrt2", 30)
    with mpmath.workdps(80):
        g = gap(cor, mpmath.pi * mpmath.sqrt(2) / 4)
    q = Fraction(p.value) / Fraction(s.value)
    sv = Fraction(s.value)
    # |p/s - p'/s'| for balls p +- ep, s +- es with s - es > 0
    quotient_err = (Fraction(p.abs_error) * sv + Fraction(p.value) * Fraction(s.abs_error)) / (
        sv * (sv - Fraction(s.abs_error)))
    consistent = abs(q - Fraction(cor.value)) <= quotient_err + Fraction(cor.abs_error)
    ok = cor.certified and g <= Fraction(1, 10 ** 30) and consistent
    record(5, ok, f"pi*sqrt(2)/4 gap {float(g):.1e}, quotient consistent: {consistent}")


def test_criterion_06_flajolet_martin():
    R = fm_R(None, EvalOptions(40))
    phi = fm_phi(None, EvalOptions(30))
    d = eval_double(None, lookup("fm_R_double").spec, EvalOptions(8, outer_terms=255, inner_digits=10), DIRECT)
    gR, gphi, gd = gap(R, ORACLES["R"]), gap(phi, ORACLES["phi"]), gap(d, ORACLES["R"])
    ok = (R.certified and Fraction(R.abs_error) <= Fraction(1, 10 ** 40) and gR <= Fraction(1, 10 ** 40)
          and gphi <= Fraction(1, 10 ** 30) and gd <= Fraction(1, 10 ** 6))
    record(6, ok, f"R gap {float(gR):.1e}, phi gap {float(gphi):.1e}, double product gap {float(gd):.1e}")


def test_criterion_07_base_b():
    notes, ok = [], True
    with mpmath.workdps(80):
        for B in (2, 3, 4, 10):
            r = single(f"sondow_base_{B}", 30)
            g = gap(r, 1 / mpmath.sqrt(B))
            ok &= g <= Fraction(1, 10 ** 30)
            notes.append(f"B={B} gap {float(g):.1e}{'' if r.certified else ' (heuristic)'}")
    record(7, ok, ", ".join(notes))


def test_criterion_08_gamma_product():
    ctx = NumericContext.for_digits(30, constants={"gamma_quarter": GAMMA_QUARTER_40})
    v = verify(ctx, lookup("ars_gamma"), EvalOptions(30))
    g = gap(single("ars_gamma", 30), ORACLES["gamma_product"])
    record(8, v.status == PASS and g <= Fraction(1, 10 ** 30), f"verify {v.status}, oracle gap {float(g):.1e}")


def test_criterion_09_borwein():
    cubes = double("borwein_n3", 20)
    g3 = gap(cubes, Fraction(2, 3))
    v2 = verify(None, lookup("borwein_n2"), EvalOptions(30))
    v4 = verify(None, lookup("borwein_n4"), EvalOptions(30))
    # direct outer product prod_{m>=2} (m^4-1)/(m^4+1) by Euler-Maclaurin, outside the double-product code
    ctx = NumericContext.for_digits(40)
    s = euler_maclaurin_sum(ctx, PolyLogTerm.ratio((-1, 0, 0, 0, 1), (1, 0, 0, 0, 1), 2), 2)
    with mpmath.workdps(60):
        outer = mpmath.exp(mp(s.value))
        outer_err = mp(s.abs_error) * outer * 2
        g4 = abs(mp(v4.value) - outer)
        n4_ok = g4 <= mp(v4.abs_error) + outer_err
        n4_oracle = abs(mp(v4.value) - mp(ORACLES["borwein_n4_direct"])) <= mp(v4.abs_error) + mpmath.mpf(10) ** -29
    ok = (g3 <= Fraction(1, 10 ** 20) and v2.status == FAIL and 0 < Fraction(v2.value) < 1
          and n4_ok and n4_oracle)
    record(9, ok, f"n^3 gap {float(g3):.1e}; n^2 {v2.status} value {v2.value[:12]} gap {v2.gap}; "
                  f"n^4 {v4.status}, matches direct outer product: {bool(n4_ok and n4_oracle)}")


# (label, evaluate(digits)); the truth is a re-run at twice the digits
SOUNDNESS_CASES = [
    ("woods_robbins", lambda t: single("woods_robbins", t)),
    ("ars_quarter", lambda t: single("ars_quarter", t)),
    ("ars_unit", lambda t: single("ars_unit", t)),
    ("ars_gamma", lambda t: single("ars_gamma", t)),
    ("sondow_base_2", lambda t: single("sondow_base_2", t)),
    ("thm1_pi", lambda t: double("thm1_pi", t)),
    ("thm1_sqrt2", lambda t: double("thm1_sqrt2", t)),
    ("corollary_pi_sqrt2", lambda t: double("corollary_pi_sqrt2", t)),
    ("borwein_n2", lambda t: double("borwein_n2", t)),
    ("borwein_n3", lambda t: double("borwein_n3", t)),
    ("borwein_n4", lambda t: double("borwein_n4", t)),
    ("fm_R", lambda t: fm_R(None, EvalOptions(t))),
    ("fm_phi", lambda t: fm_phi(None, EvalOptions(t))),
] + [(f"lemma({a},{b})", lambda t, a=a, b=b: lemma(a, b, t)) for a, b in LEMMA_PAIRS]


def test_criterion_10_soundness():
    unsound = []
    checked = 0
    for label, run in SOUNDNESS_CASES:
        r = run(30)
        if not r.certified:
            continue
        ref = run(60)
        checked += 1
        # |r - truth| <= |r - ref| + ref_err, so this proves r's bound covers the truth
        if gap(r, ref.value) > Fraction(r.abs_error) - Fraction(ref.abs_error):
            unsound.append(label)
    depth_bad = []
    drng = random.Random(5)
    for _ in range(10):
        a, b = drng.randint(0, 30), drng.randint(0, 30)
        spec = ProductSpec(lemma_term(a, b), EPS, 1)
        for d in (4, 6, 8):
            lo = eval_product(None, spec, EvalOptions(20, depth=d))
            hi = eval_product(None, spec, EvalOptions(20, depth=d + 1))
            if abs(Fraction(lo.value) - Fraction(hi.value)) > Fraction(lo.abs_error) + Fraction(hi.abs_error):
                depth_bad.append((a, b, d))
    ok = not unsound and not depth_bad
    record(10, ok, f"{checked} certified 30-digit evaluations vs 60-digit re-runs, unsound: {unsound or 'none'}; "
                   f"depth d vs d+1 disagreements: {depth_bad or 'none'}")


def _verify_all(tmp_path, threads: int) -> bytes:
    constants = tmp_path / "constants.json"
    constants.write_text(json.dumps({"gamma_quarter": GAMMA_QUARTER_40}))
    proc = subprocess.run([sys.executable, "-m", "tmprod", "verify", "--all", "--digits", "30",
                           "--constants", str(constants), "--threads", str(threads)],
                          capture_output=True, timeout=300)
    assert proc.returncode == 0, proc.stderr.decode()
    return proc.stdout


def test_criterion_11_determinism(tmp_path):
    first = _verify_all(tmp_path, 1)
    second = _verify_all(tmp_path, 1)
    threaded = _verify_all(tmp_path, 8)
    rows = json.loads(first)
    ok = first == second == threaded and len(rows) >= 15
    record(11, ok, f"verify --all: {len(rows)} verdicts, repeat identical {first == second}, "
                   f"1 vs 8 threads identical {first == threaded}")
