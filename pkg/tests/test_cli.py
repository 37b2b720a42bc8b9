import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import GAMMA_QUARTER_40
from tmprod import cli
from tmprod.evaluator import PrecisionNotAchieved


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def constants_file(tmp_path):
    path = tmp_path / "constants.json"
    path.write_text(json.dumps({"gamma_quarter": GAMMA_QUARTER_40}))
    return str(path)


def test_list_plain(capsys):
    code, out, _ = run(capsys, "list", "--output", "plain")
    assert code == 0
    line = next(l for l in out.splitlines() if l.startswith("thm1_pi "))
    assert "pi/2" in line


def test_list_json(capsys):
    code, out, _ = run(capsys, "list")
    rows = json.loads(out)
    assert code == 0 and isinstance(rows, list) and len(rows) >= 15
    assert {"id", "source", "expected", "convergence"} <= set(rows[0])
    assert next(r for r in rows if r["id"] == "fm_R_single")["expected"] == "none"


def test_eval_woods_robbins(capsys):
    code, out, _ = run(capsys, "eval", "woods_robbins", "--digits", "50")
    doc = json.loads(out)
    assert code == 0
    assert doc["value"].startswith("0.70710678")
    assert set(doc) == {"id", "value", "abs_error", "certified", "depth", "terms", "elapsed_ms"}


def test_eval_theorem_collapsed(capsys):
    code, out, _ = run(capsys, "eval", "thm1_pi", "--digits", "30", "--mode", "collapsed")
    assert code == 0 and json.loads(out)["value"].startswith("1.5707963267")


def test_eval_direct_mode(capsys):
    code, out, _ = run(capsys, "eval", "thm1_pi", "--digits", "10", "--mode", "direct", "--outer-terms", "100")
    doc = json.loads(out)
    assert code == 0 and doc["value"].startswith("1.56")


def test_eval_unknown_id(capsys):
    code, _, err = run(capsys, "eval", "no_such_id")
    assert code == 2 and "no_such_id" in err


def test_digits_cap(capsys):
    code, _, err = run(capsys, "eval", "woods_robbins", "--digits", "10001")
    assert code == 2 and "10000" in err


def test_bad_arguments_exit_two(capsys):
    assert run(capsys, "eval")[0] == 2
    assert run(capsys, "verify", "--mode", "sideways", "thm1_pi")[0] == 2


def test_verify_without_closed_form(capsys):
    code, out, _ = run(capsys, "verify", "fm_R_single")
    row = json.loads(out)[0]
    assert code == 0
    assert row["status"] == "Unverifiable" and row["reason"] == "no closed form known"
    assert row["value"].startswith("0.9212853039")


def test_verify_gamma_product(capsys, constants_file):
    code, out, _ = run(capsys, "verify", "ars_gamma", "--constants", constants_file)
    assert code == 0 and json.loads(out)[0]["status"] == "Pass"
    code, out, _ = run(capsys, "verify", "ars_gamma")
    assert json.loads(out)[0]["status"] == "Unverifiable"


def test_verify_expected_fail_does_not_fail_run(capsys):
    code, out, _ = run(capsys, "verify", "borwein_n2")
    assert json.loads(out)[0]["status"] == "Fail"
    assert code == 0


def test_verify_real_failure_exits_one(capsys, tmp_path):
    reg = tmp_path / "reg.json"
    reg.write_text(json.dumps([{"id": "bad", "weight": "epsilon", "n0": 0, "factors": [[2, 1, 1], [2, 2, -1]],
                                "expected": "1/2"}]))
    code, out, _ = run(capsys, "verify", "bad", "--registry", str(reg), "--digits", "20")
    assert code == 1 and json.loads(out)[0]["status"] == "Fail"


def test_transform_cubes(capsys):
    code, out, _ = run(capsys, "transform", "--a-poly", "m^3+1", "--b-poly", "m^3-1", "--m0", "2",
                       "--C", "2/3", "--eval", "--digits", "20")
    doc = json.loads(out)
    assert code == 0
    assert doc["family"]["a_poly"] == [1, 0, 0, 1]
    assert doc["result"]["value"].startswith("0.666666666666666666")
    assert doc["verify"]["status"] == "Pass"


def test_transform_coefficient_lists(capsys):
    code, out, _ = run(capsys, "transform", "--a-poly", "1,0,1", "--b-poly=-1,0,1", "--m0", "2", "--eval",
                       "--digits", "15")
    assert code == 0 and json.loads(out)["result"]["value"].startswith("0.27202905498")


def test_transform_equal_family(capsys):
    code, out, _ = run(capsys, "transform", "--a-poly", "m^2+1", "--b-poly", "m^2+1", "--m0", "1", "--eval")
    assert code == 0 and json.loads(out)["result"]["value"].startswith("1.0000")


@pytest.mark.parametrize("poly", ["m^5+1", "x+1", "m^2-10"])
def test_transform_invalid(capsys, poly):
    code, _, _ = run(capsys, "transform", "--a-poly", poly, "--b-poly", "m^2+2", "--m0", "1")
    assert code == 2


def test_registry_override(capsys, tmp_path):
    reg = tmp_path / "reg.json"
    reg.write_text(json.dumps([{"id": "woods_robbins", "weight": "epsilon", "n0": 0,
                                "factors": [[4, 1, 1], [4, 3, -1]], "expected": "1/2"}]))
    assert run(capsys, "list", "--registry", str(reg))[0] == 2
    code, out, _ = run(capsys, "list", "--registry", str(reg), "--allow-override")
    rows = json.loads(out)
    assert code == 0 and next(r for r in rows if r["id"] == "woods_robbins")["expected"] == "1/2"


def test_eval_registry_file(capsys, tmp_path):
    reg = tmp_path / "one.json"
    reg.write_text(json.dumps({"id": "ars_copy", "weight": "epsilon", "n0": 0, "factors": [[4, 1, 1], [4, 3, -1]]}))
    code, out, _ = run(capsys, "eval", str(reg), "--digits", "25")
    doc = json.loads(out)
    # printing truncates, so a value just below 1/2 shows as 0.4999...
    assert code == 0 and abs(Fraction(doc["value"]) - Fraction(1, 2)) <= Fraction(doc["abs_error"])


def test_precision_failure_exit_three(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise PrecisionNotAchieved("budget exhausted")
    monkeypatch.setattr(cli, "evaluate_entry", boom)
    code, _, err = run(capsys, "eval", "woods_robbins")
    assert code == 3 and "precision" in err


def test_plain_output(capsys):
    code, out, _ = run(capsys, "eval", "ars_quarter", "--output", "plain", "--digits", "20")
    assert code == 0 and out.startswith("ars_quarter: 0.4999999999") and "+-" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tmprod", "list", "--output", "plain"], capture_output=True,
                          text=True, timeout=120)
    assert proc.returncode == 0 and "woods_robbins" in proc.stdout
