import json

import numpy as np
import pytest
from click.testing import CliRunner

from specbisect.cli import main
from specbisect.mmio import write_matrix

GRID8 = ["--z0-re", "-4", "--z0-im", "-4", "--omega", "1",
         "--s1", "8", "--s2", "8"]


@pytest.fixture
def runner():
    return CliRunner()


def _write(tmp_path, name, m):
    path = tmp_path / name
    write_matrix(str(path), np.asarray(m, dtype=complex))
    return str(path)


def test_eig_command(tmp_path, runner, rng):
    g = rng.standard_normal((2, 4, 4))
    m = g[0] + 1j * g[1]
    m /= np.linalg.norm(m, 2) * 1.01
    path = _write(tmp_path, "a.mtx", m)
    out = tmp_path / "report.json"
    res = runner.invoke(main, ["eig", "--input", path, "--delta", "0.1",
                               "--seed", "7", "--output", str(out)])
    assert res.exit_code == 0, res.output
    report = json.loads(out.read_text())
    assert len(report["eigenvalues"]) == 4
    assert report["residual"] <= 0.1
    assert report["seed"] == 7
    # stdout mirrors the file
    assert json.loads(res.output) == report
    # same seed, same report
    res2 = runner.invoke(main, ["eig", "--input", path, "--delta", "0.1",
                                "--seed", "7"])
    assert json.loads(res2.output) == report


def test_eig_norm_violation_exit_1(tmp_path, runner):
    path = _write(tmp_path, "big.mtx", 3.0 * np.eye(2))
    res = runner.invoke(main, ["eig", "--input", path])
    assert res.exit_code == 1


def test_missing_input_exit_3(runner):
    res = runner.invoke(main, ["eig", "--input", "/nope/none.mtx"])
    assert res.exit_code == 3


def test_sgn_command(tmp_path, runner):
    path = _write(tmp_path, "s.mtx", np.diag([2.0, -3.0]))
    sout = tmp_path / "sign.mtx"
    res = runner.invoke(main, ["sgn", "--input", path, "--eps0", "0.1",
                               "--alpha0", "0.9", "--beta", "1e-8",
                               "--output-matrix", str(sout)])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["n_steps"] >= 1
    from specbisect.mmio import read_matrix
    s = read_matrix(str(sout))
    assert np.linalg.norm(s - np.diag([1.0, -1.0]), 2) <= 1e-8


def test_split_command(tmp_path, runner):
    path = _write(tmp_path, "sp.mtx", np.diag([-2.5 - 0.5j, 3.5 + 0.5j]))
    res = runner.invoke(main, ["split", "--input", path, "--eps", "0.4",
                               "--beta", "0.02"] + GRID8)
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["n_plus"] == 1 and report["n_minus"] == 1


def test_shatter_then_certify(tmp_path, runner):
    path = _write(tmp_path, "x.mtx", np.diag([0.5, -0.5, 0.5j, -0.5j]))
    xout = tmp_path / "xp.mtx"
    res = runner.invoke(main, ["shatter", "--input", path, "--gamma", "0.05",
                               "--seed", "3", "--output-matrix", str(xout)])
    assert res.exit_code == 0, res.output
    cert = json.loads(res.output)
    assert cert["certified"] is True
    g = cert["grid"]
    res2 = runner.invoke(main, [
        "certify", "--input", str(xout), "--eps", str(cert["epsilon"]),
        "--z0-re", repr(g["re_z0"]), "--z0-im", repr(g["im_z0"]),
        "--omega", str(g["omega"]), "--s1", str(g["s1"]), "--s2", str(g["s2"]),
        "--mesh-per-segment", "8"])
    assert res2.exit_code == 0, res2.output


def test_certify_failure_exit_2(tmp_path, runner):
    path = _write(tmp_path, "bad.mtx", np.diag([0.2 + 0.2j, 0.3 + 0.3j]))
    res = runner.invoke(main, ["certify", "--input", path, "--eps", "0.4"]
                        + GRID8)
    assert res.exit_code == 2


def test_calc_n_formula(runner):
    res = runner.invoke(main, ["calc", "n-formula", "--alpha0", "0.9",
                               "--eps0", "0.01", "--beta", "1e-3"])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["value"] == 21
    assert report["in_hardware_range"] is True


def test_calc_deflate_failure(runner):
    res = runner.invoke(main, ["calc", "deflate-failure", "--n", "4",
                               "--beta", "1e-20", "--eta", "1e-2"])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["value"] == pytest.approx(80.0**3 * 1e-10 / 1e-4)
    assert "appendix_value" in report


def test_calc_smoothed_bounds(runner):
    res = runner.invoke(main, ["calc", "smoothed-bounds", "--n", "10",
                               "--gamma", "0.1"])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["kappa_v_bound"] == pytest.approx(1000.0)
    assert report["gap_bound"] == pytest.approx(1e-9)
    assert report["value"] == pytest.approx(0.12)


def test_calc_invalid_inputs_exit_1(runner):
    res = runner.invoke(main, ["calc", "n-formula", "--alpha0", "1.5",
                               "--eps0", "0.01", "--beta", "1e-3"])
    assert res.exit_code == 1


def test_lab_command(tmp_path, runner):
    out = tmp_path / "lab.json"
    res = runner.invoke(main, ["lab", "haar-sigma", "--n", "4", "--r", "2",
                               "--trials", "400", "--seed", "11",
                               "--output", str(out)])
    assert res.exit_code == 0, res.output
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert report["trials"] == 400


def test_json_reports_have_sorted_keys(tmp_path, runner):
    res = runner.invoke(main, ["calc", "gap-tail", "--n", "12",
                               "--gamma", "0.3", "--r", "0"])
    assert res.exit_code == 0
    keys = list(json.loads(res.output).keys())
    assert keys == sorted(keys)
