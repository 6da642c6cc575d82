import csv
import json
import subprocess
import sys

import pytest

from toricfam.cli import EXIT_BUDGET, EXIT_FAIL, EXIT_INVALID, EXIT_OK, main

CUBIC = """
p = 2
n = 1
s = 1
base = "torus"
ops = ["Sym(1)", "TensorPow(2)"]
f = [{exp = [3], coef = 1}]
P = [{gamma = [1], exp = [1], coef = 1}]

[budgets]
M = 5
guard = 3
"""

LINEAR_AFFINE = """
p = 2
n = 1
s = 1
base = "affine"
ops = ["Sym(1)", "TensorPow(2)"]
f = [{exp = [1], coef = 1}]
P = [{gamma = [1], exp = [0], coef = 1}]
[budgets]
M = 6
"""


def fiber_file(p, terms):
    body = ", ".join(f"{{exp = [{e}], coef = {c}}}" for e, c in terms)
    return f"p = {p}\nn = 1\ns = 0\nf = [{body}]\n"


@pytest.fixture
def run(tmp_path, capsys):
    def go(text, *args, name="problem.toml"):
        path = tmp_path / name
        path.write_text(text)
        code = main([args[0], "--input", str(path), *args[1:]])
        out = capsys.readouterr()
        report = json.loads(out.out) if out.out.strip().startswith("{") else None
        return code, report, out

    return go


def value(entry):
    return entry["value"] if isinstance(entry, dict) and "anchor" in entry else entry


def test_analyze_cubic(run):
    code, rep, _ = run(CUBIC, "analyze")
    assert code == EXIT_OK
    g = rep["gamma"]
    assert value(g["volume"]) == "3/2"
    assert value(g["w_gamma"]) == "2/3"
    assert value(rep["bounds"]["Sym(1)"]["degree_upper"])["floor"] == 4
    assert value(rep["hodge_basis"]["weights"]) == ["0", "1/3", "2/3"]
    assert rep["bounds"]["Sym(1)"]["dwork"]["W"]["value"]["0"] == 1


def test_every_claim_has_an_anchor(run):
    _, rep, _ = run(CUBIC, "analyze")

    def walk(x):
        if isinstance(x, dict):
            if "value" in x and "anchor" in x:
                assert isinstance(x["anchor"], str) and x["anchor"]
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(rep)
    assert "anchor" in rep["gamma"]["volume"]


def test_weight_one_is_a_validation_error(run):
    text = CUBIC.replace("P = [{gamma = [1], exp = [1], coef = 1}]", "P = [{gamma = [1], exp = [3], coef = 1}]")
    code, _, out = run(text, "analyze")
    assert code == EXIT_INVALID
    assert "WeightOne" in out.err and "line 8" in out.err


def test_forced_equal_flag(run):
    text = CUBIC.replace("s = 1", "s = 2").replace("gamma = [1]", "gamma = [1, 1]")
    code, rep, _ = run(text, "analyze")
    assert code == EXIT_OK
    assert value(rep["gamma"]["forced_equal_degrees"]) is True


def test_fiber_kloosterman(run):
    code, rep, _ = run(fiber_file(3, [(1, 1), (-1, 1)]), "fiber")
    assert code == EXIT_OK
    assert value(rep["lpoly"]) == [[1, 0], [-1, 0], [3, 0]]
    assert rep["coincide"] is True and rep["verdict"]["status"] == "Pass"


def test_fiber_degenerate(run):
    code, rep, _ = run(fiber_file(3, [(3, 1)]), "fiber")
    assert code == EXIT_FAIL
    assert rep["delta"]["nondegenerate"]["status"] == "Degenerate"


def test_fiber_linear(run):
    code, rep, _ = run(fiber_file(3, [(1, 1)]), "fiber")
    assert code == EXIT_OK and value(rep["lpoly"]) == [[1, 0], [-1, 0]]


def test_fiber_at_parameter(run):
    code, rep, _ = run(CUBIC + "\n[fiber]\nlambda = [1]\ndegree = 1\n", "fiber")
    assert code == EXIT_OK and value(rep["degree"]) == 3 and rep["lambda"] == [1]


def test_family_vanishing(run):
    code, rep, _ = run(LINEAR_AFFINE, "family")
    assert code == EXIT_OK
    assert all(c == [0] for c in value(rep["operations"]["Sym(1)"]["series"])[1:])
    # TensorPow(2): sum over t of S(t)^2 = q, so L = 1 / (1 - 2T)
    assert value(rep["operations"]["TensorPow(2)"]["rational"]["den"]) == [[1], [-2]]
    for r in rep["operations"].values():
        assert all(v["status"] != "Fail" for v in r["checks"].values())
    assert rep["operations"]["TensorPow(2)"]["oracle"]["status"] == "Pass"


def test_family_cubic_has_divisibility_table(run):
    code, rep, _ = run(CUBIC, "family")
    assert code == EXIT_OK
    table = value(rep["operations"]["Sym(1)"]["divisibility_table"])
    assert table[0] == [0, "0"] and len(table) == 6


def test_family_oracle_fault(run):
    code, rep, _ = run(CUBIC, "family", "--inject-fault")
    assert code == EXIT_FAIL
    verdict = rep["operations"]["TensorPow(2)"]["oracle"]
    assert verdict["status"] == "Fail" and verdict["witness"] == 5


def test_budget_abort_and_force(run):
    code, rep, out = run(LINEAR_AFFINE, "family", "--budget-seconds", "0.000001")
    assert code == EXIT_BUDGET and rep is None and "cost model" in out.err
    code, rep, _ = run(LINEAR_AFFINE, "family", "--budget-seconds", "0.000001", "--force")
    assert code == EXIT_OK and rep is not None


def test_reports_are_deterministic(run):
    outs = [run(CUBIC, "family", "--threads", str(t))[2].out for t in (1, 4, 1)]
    assert outs[0] == outs[1] == outs[2]


def test_json_input_matches_toml(run):
    data = {
        "p": 2, "n": 1, "s": 1, "base": "torus", "ops": ["Sym(1)", "TensorPow(2)"],
        "f": [{"exp": [3], "coef": 1}], "P": [{"gamma": [1], "exp": [1], "coef": 1}],
        "budgets": {"M": 5, "guard": 3},
    }
    a = run(CUBIC, "analyze")[2].out
    b = run(json.dumps(data, indent=1), "analyze", name="problem.json")[2].out
    assert a == b


def test_syntax_error_has_line(run):
    code, _, out = run("p = 2\nn = 1\nf = [{exp = [1] coef = 1}]\n", "analyze")
    assert code == EXIT_INVALID and "line 3" in out.err


def test_not_prime_and_bad_exponent(run):
    assert run(fiber_file(4, [(1, 1)]), "analyze")[0] == EXIT_INVALID
    code, _, out = run("p = 3\nn = 2\nf = [{exp = [1], coef = 1}]\n", "analyze")
    assert code == EXIT_INVALID and "line 3" in out.err


def test_text_and_csv(run, tmp_path):
    csv_path = tmp_path / "poly.csv"
    code, _, out = run(fiber_file(3, [(1, 1), (-1, 1)]), "fiber", "--format", "text", "--csv", str(csv_path))
    assert code == EXIT_OK
    assert "verdict:" in out.out and 'status: "Pass"' in out.out
    rows = list(csv.reader(csv_path.open()))
    assert rows[0] == ["polygon", "x", "y"]
    assert ["newton", "2", "1"] in rows and ["hodge", "1", "0"] in rows


def test_out_file(run, tmp_path):
    dest = tmp_path / "report.json"
    code, _, out = run(fiber_file(3, [(1, 1)]), "fiber", "--out", str(dest))
    assert code == EXIT_OK and out.out == ""
    assert json.loads(dest.read_text())["command"] == "fiber"


def test_bounds_command(run):
    code, rep, _ = run(CUBIC, "bounds")
    assert code == EXIT_OK and rep["command"] == "bounds" and "hodge_basis" not in rep


def test_selftest_module_entry():
    res = subprocess.run([sys.executable, "-m", "toricfam", "selftest"], capture_output=True, text=True)
    assert res.returncode == 0
    rep = json.loads(res.stdout)
    assert all(v["status"] == "Pass" for v in rep["checks"].values())
