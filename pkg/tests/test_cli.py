import csv
import io
import json
import re
import subprocess
import sys
from collections import Counter
from fractions import Fraction

import pytest

from poisson_k import cli
from poisson_k.config import load_settings
from poisson_k.moments import Method, MomentKind, MomentResult, moment
from poisson_k.polynomial import LambdaPolynomial
from poisson_k.verification import OracleReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_pmf_exact(capsys):
    code, rec = run_json(capsys, "pmf", "-n", "2", "-k", "2", "--exact")
    assert code == 0
    assert rec["command"] == "pmf"
    assert rec["payload"]["coefficients"] == ["0/1", "1/1", "1/2"]
    assert rec["payload"]["factor"] == "exp(-2*lambda)"


def test_pmf_exact_sum_method_with_rate(capsys):
    code, rec = run_json(capsys, "pmf", "-n", "2", "-k", "2", "--exact", "--method", "sum", "--lambda", "1")
    assert rec["payload"]["coefficients"] == ["0/1", "1/1", "1/2"]
    assert rec["payload"]["q_value"] == "3/2"


@pytest.mark.parametrize(
    "n,k,expected",
    [("0", "3", 0.049787068), ("3", "1", 0.061313240)],
)
def test_pmf_float(capsys, n, k, expected):
    code, rec = run_json(capsys, "pmf", "-n", n, "-k", k, "--lambda", "1", "--float")
    assert code == 0
    assert rec["payload"]["probability"]["float"] == pytest.approx(expected, abs=1e-9)


def test_cdf(capsys):
    code, rec = run_json(capsys, "cdf", "-n", "2", "-k", "2", "--lambda", "1")
    assert rec["payload"]["probability"]["float"] == pytest.approx(0.4736734914, abs=1e-10)


@pytest.mark.parametrize(
    "argv,expected",
    [
        (("--raw", "-n", "4", "-k", "1"), ["0/1", "1/1", "7/1", "6/1", "1/1"]),
        (("--central", "-n", "4", "-k", "2"), ["0/1", "17/1", "75/1"]),
    ],
)
def test_moment(capsys, argv, expected):
    code, rec = run_json(capsys, "moment", *argv)
    assert code == 0
    assert rec["payload"]["coefficients"] == expected


def test_moment_all_methods(capsys):
    code, rec = run_json(capsys, "moment", "--factorial", "-n", "2", "-k", "2", "--method", "all")
    assert code == 0
    assert rec["payload"]["agreement"] is True
    assert [r["coefficients"] for r in rec["payload"]["results"]] == [["0/1", "2/1", "9/1"]] * 3


def test_moment_evaluation_keeps_exact_and_float_apart(capsys):
    code, rec = run_json(capsys, "moment", "--raw", "-n", "2", "-k", "2", "--lambda", "1/3")
    payload = rec["payload"]
    assert payload["value"] == "8/3"  # 9/9 + 5/3
    assert payload["value_float"] == {"float": pytest.approx(8 / 3)}


def test_moment_round_trip(capsys):
    code, rec = run_json(capsys, "moment", "--central", "-n", "9", "-k", "3")
    poly = LambdaPolynomial.from_json(rec["payload"]["coefficients"])
    assert poly == moment(MomentKind.CENTRAL, 9, 3).poly


def test_method_disagreement_exits_2(capsys, monkeypatch):
    def broken(kind, n, k, method=Method.RECURRENCE):
        r = moment(kind, n, k, method)
        if method is Method.SUM:
            return MomentResult(r.kind, n, k, r.poly + LambdaPolynomial.one(), r.method)
        return r

    monkeypatch.setattr(cli, "moment", broken)
    code, rec = run_json(capsys, "moment", "--raw", "-n", "3", "-k", "2", "--method", "all")
    assert code == cli.EXIT_VERIFY
    assert rec["payload"]["agreement"] is False


def _table(capsys, kind, k, n_max, fmt):
    code, out, _ = run(capsys, "table", f"--{kind}", "-k", str(k), "--n-max", str(n_max), "--format", fmt)
    assert code == 0
    return out


def test_table_central_csv(capsys):
    out = _table(capsys, "central", 1, 7, "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    mu6 = rows[6]
    assert (mu6["c1"], mu6["c2"], mu6["c3"]) == ("1/1", "25/1", "15/1")
    mu7 = rows[7]
    assert (mu7["c1"], mu7["c2"], mu7["c3"]) == ("1/1", "56/1", "105/1")


def test_table_raw_json(capsys):
    out = _table(capsys, "raw", 1, 6, "json")
    rows = json.loads(out)["payload"]["rows"]
    assert rows[5]["coefficients"] == ["0/1", "1/1", "15/1", "25/1", "10/1", "1/1"]
    assert rows[6]["coefficients"] == ["0/1", "1/1", "31/1", "90/1", "65/1", "15/1", "1/1"]


def test_table_factorial_latex(capsys):
    out = _table(capsys, "factorial", 1, 4, "latex")
    assert "M_{(4)} &= \\lambda^{4}" in out
    assert "M_{(1)} &= \\lambda \\\\" in out


def _latex_multisets(text):
    result = []
    for line in text.splitlines():
        if "&=" not in line:
            continue
        rhs = line.split("&=")[1].strip().rstrip("\\").strip()
        coeffs = Counter()
        for term in re.split(r" [+-] ", rhs):
            if term == "0":
                continue
            m = re.match(r"^(?:\\tfrac\{(\d+)\}\{(\d+)\}|(\d+))?(\\lambda.*)?$", term)
            if m.group(1):
                coeffs[f"{m.group(1)}/{m.group(2)}"] += 1
            elif m.group(3):
                coeffs[f"{m.group(3)}/1"] += 1
            else:
                coeffs["1/1"] += 1
        result.append(coeffs)
    return result


@pytest.mark.parametrize("kind,k", [("raw", 1), ("central", 3), ("factorial", 2)])
def test_table_formats_agree(capsys, kind, k):
    rows = json.loads(_table(capsys, kind, k, 8, "json"))["payload"]["rows"]
    from_json = [Counter(c for c in r["coefficients"] if c != "0/1") for r in rows]
    reader = csv.reader(io.StringIO(_table(capsys, kind, k, 8, "csv")))
    next(reader)
    from_csv = [Counter(c for c in row[1:] if c != "0/1") for row in reader]
    from_latex = _latex_multisets(_table(capsys, kind, k, 8, "latex"))
    assert from_json == from_csv == from_latex


def test_table_cap(capsys):
    code, _, err = run(capsys, "table", "--raw", "-k", "1", "--n-max", "31")
    assert code == cli.EXIT_USAGE
    assert "cap" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("pmf", "-n", "2", "-k", "0"),
        ("pmf", "-n", "-1", "-k", "2"),
        ("pmf", "-n", "2", "-k", "2", "--lambda", "-1"),
        ("pmf", "-n", "2", "-k", "2", "--lambda", "abc"),
        ("pmf", "-n", "2", "-k", "2", "--float"),
        ("table", "--raw", "-k", "1", "--n-max", "3", "--format", "xml"),
        ("moment", "-n", "2", "-k", "2"),
        ("bogus",),
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    # argparse errors exit; errors found inside a command are returned
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_verify_exact_suite(capsys):
    code, rec = run_json(capsys, "verify", "--k-max", "4", "--n-max", "10", "--lambda", "1", "--mc-count", "0")
    assert code == 0
    assert rec["payload"]["failed"] == 0
    assert rec["payload"]["monte_carlo"] == "skipped"


def test_verify_monte_carlo(capsys):
    code, rec = run_json(
        capsys, "verify", "--k-max", "2", "--n-max", "4", "--lambda", "1", "--mc-count", "1000000", "--seed", "42"
    )
    assert code == 0
    mean_k2 = next(r for r in rec["payload"]["reports"] if r["quantity"].startswith("mc mean k=2"))
    assert mean_k2["exact_value"]["float"] == 3.0
    assert mean_k2["passed"]


@pytest.mark.slow
def test_verify_rational_rate(capsys):
    code, rec = run_json(capsys, "verify", "--k-max", "6", "--n-max", "12", "--lambda", "1/3")
    assert code == 0
    assert rec["params"]["lambda"] == ["1/3"]


def test_verify_failure_exits_2(capsys, monkeypatch):
    bad = OracleReport("forced", 1.0, 2.0, 1.0, 1.0, 0.0, False)
    monkeypatch.setattr(cli, "run_verification", lambda *a, **kw: [bad])
    code, rec = run_json(capsys, "verify", "--k-max", "1", "--n-max", "1")
    assert code == cli.EXIT_VERIFY
    assert rec["payload"]["failed"] == 1


def test_config_file_and_seed_env(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"table_cap": 5, "seed": 9}))
    assert load_settings(cfg, env={}).table_cap == 5
    assert load_settings(cfg, env={"POISSON_K_SEED": "77"}).seed == 77
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    with pytest.raises(ValueError):
        load_settings(bad, env={})


def test_config_applies_to_table_cap(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"table_cap": 3}))
    code, _, err = run(capsys, "--config", str(cfg), "table", "--raw", "-k", "1", "--n-max", "4")
    assert code == cli.EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "poisson_k", "moment", "--raw", "-n", "2", "-k", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["coefficients"] == ["0/1", "5/1", "9/1"]
