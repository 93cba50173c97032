import csv
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from qnglab_cli import verify
from qnglab_cli.cli import qnglab
from qnglab_cli.errors import SingularMetric


@pytest.fixture
def runner(isolated_config):
    """CliRunner with the user config isolated and sweeps run serially."""
    return CliRunner(env={"QNGLAB_THREADS": "0"})


def _read_csv(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def test_petz_curve_writes_csv(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["petz-curve", "--alpha", "0.5,sld,-1", "--samples", "20", "--out", "curve.csv"])
        assert result.exit_code == 0, result.output
        assert "✅ Wrote" in result.output
        rows = _read_csv("curve.csv")
        assert {r["alpha"] for r in rows} == {"0.5", "sld", "-1.0"}
        for r in rows:
            if r["alpha"] == "0.5":
                assert float(r["f"]) == pytest.approx((1.0 + float(r["t"])) / 2.0, rel=1e-12)
            if r["t"] == "1":
                assert r["f"] == "1"


def test_petz_curve_is_byte_stable(runner):
    with runner.isolated_filesystem():
        args = ["petz-curve", "--alpha", "0.1,0.3,100,-100", "--envelope"]
        runner.invoke(qnglab, args + ["--out", "a.csv"])
        runner.invoke(qnglab, args + ["--out", "b.csv"])
        assert Path("a.csv").read_bytes() == Path("b.csv").read_bytes()
        assert Path("a.csv").read_text().splitlines()[0] == "t,alpha,f"


def test_petz_curve_default_alphas_from_config(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["petz-curve", "--samples", "5"])
        assert result.exit_code == 0, result.output
        alphas = []
        for r in _read_csv("petz_curve.csv"):
            if r["alpha"] not in alphas:
                alphas.append(r["alpha"])
        assert alphas == ["0.1", "0.3", "0.5", "100.0", "-100.0", "-1.0", "-0.3", "-0.1"]


@pytest.mark.parametrize("args", [
    ["--alpha", "0"],
    ["--alpha", "banana"],
    ["--t-min", "-1"],
])
def test_petz_curve_rejects_bad_input(runner, args):
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["petz-curve"] + args)
        assert result.exit_code == 1
        assert "petz-curve failed" in result.output


def test_optimize_writes_csv_and_meta(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["optimize", "--alpha", "0.1,0.5", "--max-iters", "3", "--out", "out/run.csv"])
        assert result.exit_code == 0, result.output
        assert "alpha=0.1 - COMPLETED" in result.output
        assert "Wrote out/run.csv and out/run.csv.meta.yaml" in result.output
        rows = _read_csv("out/run.csv")
        assert len(rows) == 8
        assert list(rows[0].keys()) == ["iter", "alpha", "cost", "grad_norm", "step_norm", "predicted_decrease"]
        meta = yaml.safe_load(Path("out/run.csv.meta.yaml").read_text())
        assert [run["alpha"] for run in meta["runs"]] == ["0.1", "0.5"]


def test_optimize_flags_win_over_config_file(runner):
    with runner.isolated_filesystem():
        Path("exp.cfg").write_text("alpha = [0.3]\nmax_iters = 10\nmode = fixed\n")
        result = runner.invoke(qnglab, ["optimize", "--config", "exp.cfg", "--max-iters", "2"])
        assert result.exit_code == 0, result.output
        rows = _read_csv("optimize.csv")
        assert len(rows) == 3
        meta = yaml.safe_load(Path("optimize.csv.meta.yaml").read_text())
        assert meta["config"]["mode"] == "fixed"
        assert meta["config"]["max_iters"] == 2


def test_optimize_from_target_converges_at_once(runner):
    with runner.isolated_filesystem():
        Path("exp.cfg").write_text("theta0 = [0, 0, 0]\nalpha = [0.1, -0.3]\n")
        result = runner.invoke(qnglab, ["optimize", "--config", "exp.cfg"])
        assert result.exit_code == 0, result.output
        rows = _read_csv("optimize.csv")
        assert [(r["iter"], r["cost"]) for r in rows] == [("0", "0"), ("0", "0")]
        meta = yaml.safe_load(Path("optimize.csv.meta.yaml").read_text())
        assert [run["status"] for run in meta["runs"]] == ["converged", "converged"]


def test_optimize_softmax_family(runner):
    with runner.isolated_filesystem():
        Path("exp.cfg").write_text(
            "family = softmax\ntheta0 = [0, 0, 0]\nlogits_target = [1, 0, -1]\n"
            "mode = fixed\neta = 0.5\nmax_iters = 50\nalpha = [0.5, 2]\n"
        )
        result = runner.invoke(qnglab, ["optimize", "--config", "exp.cfg"])
        assert result.exit_code == 0, result.output
        rows = _read_csv("optimize.csv")
        first = [r["cost"] for r in rows if r["alpha"] == "0.5"]
        second = [r["cost"] for r in rows if r["alpha"] == "2.0"]
        assert first == second
        assert float(first[-1]) < float(first[0])


def test_optimize_singular_metric_exits_nonzero(runner, mocker):
    mocker.patch("qnglab_cli.optimizer.natural_gradient_step", side_effect=SingularMetric("pivot below floor"))
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["optimize", "--alpha", "0.3", "--max-iters", "3", "--regime"])
        assert result.exit_code == 1
        assert "iteration 0: pivot below floor" in result.output
        rows = _read_csv("optimize.csv")
        assert len(rows) == 1
        assert rows[0]["regime"] == "error"
        assert rows[0]["cost"] == ""


def test_petz_curve_regime_column(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["petz-curve", "--alpha", "0.3,2", "--samples", "5", "--regime"])
        assert result.exit_code == 0, result.output
        rows = _read_csv("petz_curve.csv")
        assert {(r["alpha"], r["regime"]) for r in rows} == {("0.3", "non-monotone"), ("2.0", "monotone")}


def test_optimize_degenerate_state_keeps_output(runner):
    with runner.isolated_filesystem():
        Path("exp.cfg").write_text("bloch = [0.99999999999999, 0, 0]\ndelta = 0.0\nalpha = [0.5, -0.3]\n")
        result = runner.invoke(qnglab, ["optimize", "--config", "exp.cfg", "--max-iters", "3"])
        assert result.exit_code == 1
        assert "iteration 0: " in result.output
        rows = _read_csv("optimize.csv")
        assert [(r["iter"], r["alpha"], r["cost"]) for r in rows] == [("0", "0.5", ""), ("0", "-0.3", "")]
        meta = yaml.safe_load(Path("optimize.csv.meta.yaml").read_text())
        assert [run["status"] for run in meta["runs"]] == ["error", "error"]
        assert all("below the floor" in run["message"] for run in meta["runs"])


def test_optimize_rejects_bad_parameters(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(qnglab, ["optimize", "--xi", "1.5"])
        assert result.exit_code == 1
        assert "optimize failed" in result.output
        assert not Path("optimize.csv").exists()


def test_verify_passes(runner):
    result = runner.invoke(qnglab, ["verify", "--trials", "1", "--seed", "3"])
    assert result.exit_code == 0, result.output
    assert "VERIFICATION REPORT" in result.output
    assert "FAIL" not in result.output


def test_verify_negative_control_is_reported_as_expected_failure(runner):
    result = runner.invoke(qnglab, ["verify", "--trials", "1", "--negative-control"])
    assert result.exit_code == 0, result.output
    assert "❎" in result.output
    assert "1 expected failures" in result.output


def test_verify_failure_exits_nonzero(runner, mocker):
    mocker.patch.object(verify, "PROPERTIES", [
        verify.Property("SPD solve residual", "optimizer", lambda rng, trials: 1.0, 1e-10),
    ])
    result = runner.invoke(qnglab, ["verify", "--trials", "1"])
    assert result.exit_code == 1
    assert "❌ SPD solve residual - FAILED" in result.output


def test_verify_rejects_zero_trials(runner):
    result = runner.invoke(qnglab, ["verify", "--trials", "0"])
    assert result.exit_code == 1
    assert "verify failed" in result.output


def test_config_view_and_path(runner, isolated_config):
    isolated_config.write_text("eta: 1.0e-2\n")
    result = runner.invoke(qnglab, ["config", "view"])
    assert result.exit_code == 0, result.output
    shown = yaml.safe_load(result.output)
    assert shown["eta"] == 1e-2
    assert shown["family"] == "rotation"

    result = runner.invoke(qnglab, ["config", "path"])
    assert result.output.strip() == str(isolated_config)


def test_config_view_reports_bad_file(runner):
    with runner.isolated_filesystem():
        Path("exp.cfg").write_text("unknown_key = 1\n")
        result = runner.invoke(qnglab, ["config", "view", "--config", "exp.cfg"])
        assert result.exit_code == 1
        assert "Could not load configuration" in result.output
