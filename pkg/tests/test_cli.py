import json
import subprocess
import sys

import pytest

from kptau.cli import main, parse_range
from kptau.io import read_series, write_series
from kptau.tau import TauSeries


@pytest.fixture(scope="module")
def tau3_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "tau3.json"
    assert main(["compute", "--gmax", "3", "--out", str(path)]) == 0
    return path


def test_compute_gmax_zero(tmp_path):
    out = tmp_path / "t0.json"
    assert main(["compute", "--gmax", "0", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["layers"] == [[{"exponents": {}, "coeff": ["1"]}]]


def test_n_is_serialised_as_polynomial(tau3_file):
    layer1 = json.loads(tau3_file.read_text())["layers"][1]
    row = next(r for r in layer1 if r["exponents"] == {"1": 1, "2": 1})
    assert row["coeff"] == ["0", "2"]


def test_resume_is_byte_identical(tmp_path, tau3_file):
    short, resumed = tmp_path / "t1.json", tmp_path / "t3.json"
    assert main(["compute", "--gmax", "1", "--out", str(short)]) == 0
    assert main(["compute", "--gmax", "3", "--resume", str(short), "--out", str(resumed)]) == 0
    assert resumed.read_bytes() == tau3_file.read_bytes()


def test_verify_good_file(tau3_file, capsys):
    assert main(["verify", str(tau3_file), "--suite", "annihilation", "--range", "-1..1"]) == 0
    assert main(["verify", str(tau3_file), "--suite", "degree"]) == 0
    assert capsys.readouterr().out.strip().endswith("PASS")


def test_verify_names_failing_operator(tmp_path, tau3_file, capsys):
    tau, _ = read_series(tau3_file)
    layers = dict(tau.layers)
    layers[2] = layers[2].scale(-1)
    bad = tmp_path / "bad.json"
    write_series(bad, TauSeries(layers))
    report = tmp_path / "report.txt"
    assert main(["verify", str(bad), "--suite", "annihilation", "--range", "-1..1", "--out", str(report)]) == 1
    out = capsys.readouterr().out
    assert "FAIL: Lsf[" in out or "FAIL: Msf[" in out
    assert "RESULT: FAIL" in report.read_text()


def test_verify_commutators_with_negative_range(capsys):
    assert main(["verify", "--suite", "commutators", "--range", "-1..1", "--W", "6"]) == 0


def test_verify_eval_n(tau3_file):
    assert main(["verify", str(tau3_file), "--suite", "degree", "--eval-n", "1/2"]) == 0


def test_correlators(tau3_file, tmp_path, capsys):
    out = tmp_path / "table.json"
    assert main(["correlators", str(tau3_file), "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0].split() == ["alphas", "betas", "h", "b", "value"]
    rows = json.loads(out.read_text())
    assert {"alphas": [1], "betas": [], "h": 1, "b": 0, "value": "1/24"} in rows


@pytest.mark.parametrize("argv", [
    ["compute", "--out", "x.json"],
    ["compute", "--gmax", "1"],
    ["verify", "/nonexistent/tau.json"],
    ["verify", "--suite", "degree"],
    ["correlators", "/nonexistent/tau.json"],
    ["verify", "--suite", "miura", "--range", "3..1"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_parse_range():
    assert parse_range("-3..3") == (-3, 3)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "kptau", "selfcheck", "--gmax", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stdout + r.stderr
    assert r.stdout.strip().endswith("PASS")


def test_short_file_for_range_is_usage_error(tau3_file):
    assert main(["verify", str(tau3_file), "--suite", "annihilation", "--range", "-2..6"]) == 2
