from __future__ import annotations

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fatkappa import distributions as D
from fatkappa.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text, newline="")))


def test_kappa_student(capsys):
    code, out, _ = run(capsys, "kappa", "--spec", "studentt:alpha=3", "--n0", "1", "--n", "2")
    assert code == 0
    (r,) = rows(out)
    assert float(r["value"]) == pytest.approx(0.2905, abs=5e-5)
    assert r["method"] == "closed_form" and r["std_error"] == "0.0" and r["seed"] == "0"
    assert r["version"]


def test_kappa_gaussian_flat(capsys):
    _, out, _ = run(capsys, "kappa", "--spec", "gaussian:mu=0,sigma=1", "--n0", "1", "--n", "50")
    assert float(rows(out)[0]["value"]) == 0.0


def test_kappa_pareto_simulated(capsys):
    code, out, _ = run(capsys, "kappa", "--spec", "pareto:alpha=2", "--n", "30", "--method", "mc",
                       "--samples", "1e6", "--seed", "42")
    assert code == 0
    r = rows(out)[0]
    assert float(r["value"]) == pytest.approx(0.484, abs=0.02)
    assert r["method"] == "monte_carlo" and r["seed"] == "42" and float(r["std_error"]) > 0


def test_csv_byte_identical(capsys):
    argv = ["trace", "--spec", "pareto:alpha=2.5", "--spec", "studentt:alpha=3", "--n-grid", "2,10",
            "--samples", "64000", "--seed", "5"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    _, c, _ = run(capsys, *argv, "--threads", "3")
    assert a.encode() == b.encode() == c.encode()


def test_tables_cells(capsys):
    _, out, _ = run(capsys, "tables", "table1")
    t = rows(out)
    expo = next(r for r in t if r["row"] == "exponential")
    assert float(expo["value"]) == pytest.approx(0.2057, abs=5e-5)
    _, out, _ = run(capsys, "tables", "pareto_vs_student", "--alphas", "3.5", "--samples", "1e6", "--seed", "1")
    cell = next(r for r in rows(out) if r["row"] == "studentt" and r["column"] == "kappa_1_100")
    assert float(cell["value"]) == pytest.approx(0.121, abs=0.02)


def test_tables_low_alpha_pareto(capsys):
    _, out, _ = run(capsys, "tables", "pareto_vs_student", "--alphas", "1.25", "--samples", "1e6", "--seed", "1")
    cell = next(r for r in rows(out) if r["row"] == "pareto" and r["column"] == "kappa_1_100")
    assert float(cell["value"]) == pytest.approx(0.771, abs=0.03)


def test_equiv(capsys):
    _, out, _ = run(capsys, "equiv", "--spec", "studentt:alpha=3", "--ng", "30")
    r = rows(out)[0]
    assert 115 <= float(r["value"]) <= 125 and r["method"] == "approx_kappa1"
    _, out, _ = run(capsys, "equiv", "--spec", "studentt:alpha=3", "--equiv-method", "all")
    assert [r["method"] for r in rows(out)] == ["approx_kappa1", "approx_kappa1n", "exact_mad_match"]


def test_lognormal_sweep(capsys):
    _, out, _ = run(capsys, "lognormal", "--sigma-grid", "0.1:5:0.1", "--n", "2", "--samples", "64000")
    t = rows(out)
    assert len(t) == 50
    vals = [float(r["value"]) for r in t]
    assert vals[0] < 0.05 and vals[-1] > 0.99
    assert all(float(r["kappa_star"]) <= 1 for r in t)


def test_portfolio_and_plan(capsys):
    _, out, _ = run(capsys, "portfolio", "--spec", "gaussian", "--nmax", "4")
    t = rows(out)
    assert float(t[-1]["value"]) == pytest.approx(0.5) and t[-1]["assumption"] == "iid"
    _, out, _ = run(capsys, "plan", "--spec", "gaussian", "--target", "0.1")
    assert rows(out)[0]["value"] == "100"


def test_other_commands(capsys, tmp_path):
    assert run(capsys, "chain", "--spec", "exponential", "--nmax", "5")[0] == 0
    _, out, _ = run(capsys, "mad", "--spec", "studentt:alpha=3", "--n", "1,2")
    assert float(rows(out)[1]["value"]) == pytest.approx(1.653986686265376, rel=1e-12)
    _, out, _ = run(capsys, "mixture", "--d", "10")
    k = next(r for r in rows(out) if r["quantity"] == "kappa_1")
    assert float(k["value"]) < 0
    _, out, _ = run(capsys, "stable", "--alpha", "1.5,2")
    assert [float(r["value"]) for r in rows(out)] == [0.5, 0.0]
    data = tmp_path / "x.txt"
    data.write_text("\n".join(str(v) for v in D.sample(D.Gaussian(), 20_000, seed=3)))
    _, out, _ = run(capsys, "empirical", "--input", str(data), "--n", "10", "--bootstrap", "5")
    assert abs(float(rows(out)[0]["value"])) < 0.1


def test_json_output_and_file(capsys, tmp_path):
    path = tmp_path / "k.jsonl"
    code, out, _ = run(capsys, "kappa", "--spec", "studentt:alpha=3", "--format", "json", "--output", str(path))
    assert code == 0 and out == ""
    rec = json.loads(path.read_text())
    assert rec["method"] == "closed_form" and rec["seed"] == 0


def test_spec_from_json_file(capsys, tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(D.StudentT(3).to_json())
    _, out, _ = run(capsys, "kappa", "--spec", str(path))
    assert float(rows(out)[0]["value"]) == pytest.approx(0.2905, abs=5e-5)


@pytest.mark.parametrize("argv,code,kind", [
    # Bad specs are rejected while parsing arguments.
    (["kappa", "--spec", "studentt:alpha=0.5"], 2, "usage"),
    (["kappa", "--spec", "gaussian", "--n0", "3", "--n", "2"], 2, "domain"),
    (["kappa", "--spec", "nonsense:x=1"], 2, "usage"),
    (["kappa", "--spec", "lognormal:mu=0,sigma=1", "--n", "3", "--method", "cf"], 2, "domain"),
    (["kappa"], 2, "usage"),
    (["frobnicate"], 2, "usage"),
    (["kappa", "--spec", "gaussian", "--samples", "1.5"], 2, "usage"),
    (["empirical", "--input", "/nonexistent/file.txt"], 2, "domain"),
])
def test_error_exit_codes(capsys, argv, code, kind):
    rc, out, err = run(capsys, *argv)
    assert rc == code and out == ""
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["exit_code"] == code and payload["error"] == kind


def test_numeric_failure_exit_code(capsys, monkeypatch):
    from fatkappa import cli
    from fatkappa.errors import NumericError

    def boom(*a, **k):
        raise NumericError("quadrature did not converge")
    monkeypatch.setattr(cli, "kappa", boom)
    rc, _, err = run(capsys, "kappa", "--spec", "gaussian")
    assert rc == 3 and json.loads(err)["error"] == "numeric"


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "fatkappa.cli", "stable", "--alpha", "1.25"],
                         capture_output=True, text=True, check=True)
    assert math.isclose(float(rows(out.stdout)[0]["value"]), 0.75)
