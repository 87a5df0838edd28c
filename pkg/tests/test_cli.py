import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from chicap import serialize
from chicap.cli import main
from chicap.rand import random_channel, random_ensemble


@pytest.fixture
def runner():
    return CliRunner()


def _write_channel(path, dim=2):
    rng = np.random.default_rng(0)
    phi = random_channel(dim, dim, rng)
    path.write_text(serialize.dumps(serialize.channel_to_dict(phi)))


def _write_identity_channel(path, dim=2):
    from chicap import identity_channel

    path.write_text(serialize.dumps(serialize.channel_to_dict(identity_channel(dim))))


def _write_ensemble(path, dim=2, n=2):
    rng = np.random.default_rng(1)
    pi = random_ensemble(dim, n, rng)
    path.write_text(serialize.dumps(serialize.ensemble_to_dict(pi)))


def _write_constraint(path, energies=(0.0, 1.0), bound=0.3):
    path.write_text(
        serialize.dumps({"energies": list(energies), "bound": bound})
    )


class TestChiCommand:
    def test_stdout_json(self, runner, tmp_path):
        _write_channel(tmp_path / "phi.json")
        _write_ensemble(tmp_path / "pi.json")
        result = runner.invoke(
            main,
            ["chi", "--channel", str(tmp_path / "phi.json"),
             "--ensemble", str(tmp_path / "pi.json")],
        )
        assert result.exit_code == 0
        assert json.loads(result.output)["chi"] >= 0.0

    def test_out_file(self, runner, tmp_path):
        _write_channel(tmp_path / "phi.json")
        _write_ensemble(tmp_path / "pi.json")
        out = tmp_path / "chi.json"
        result = runner.invoke(
            main,
            ["chi", "--channel", str(tmp_path / "phi.json"),
             "--ensemble", str(tmp_path / "pi.json"), "--out", str(out)],
        )
        assert result.exit_code == 0
        assert "chi" in json.loads(out.read_text())
        assert not (tmp_path / "chi.json.tmp").exists()

    def test_invalid_channel_file_exit_one(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        _write_ensemble(tmp_path / "pi.json")
        result = runner.invoke(
            main,
            ["chi", "--channel", str(bad), "--ensemble", str(tmp_path / "pi.json")],
        )
        assert result.exit_code == 1

    def test_missing_file_rejected(self, runner, tmp_path):
        result = runner.invoke(
            main,
            ["chi", "--channel", str(tmp_path / "nope.json"),
             "--ensemble", str(tmp_path / "nope2.json")],
        )
        assert result.exit_code != 0


class TestCapacityCommand:
    def test_unconstrained(self, runner, tmp_path):
        _write_identity_channel(tmp_path / "phi.json")
        result = runner.invoke(
            main, ["capacity", "--channel", str(tmp_path / "phi.json")]
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["chi_value"] == pytest.approx(1.0, abs=1e-6)
        assert data["constraint_active"] is False

    def test_constrained_with_artifacts(self, runner, tmp_path):
        _write_identity_channel(tmp_path / "phi.json")
        _write_constraint(tmp_path / "h.json", bound=0.3)
        out = tmp_path / "report.json"
        result = runner.invoke(
            main,
            ["capacity", "--channel", str(tmp_path / "phi.json"),
             "--constraint", str(tmp_path / "h.json"), "--out", str(out)],
        )
        assert result.exit_code == 0
        data = json.loads(out.read_text())
        assert data["constraint_active"] is True
        # Figure and trace table land alongside the report.
        assert (tmp_path / "report.trace.csv").exists()
        assert (tmp_path / "report.png").stat().st_size > 0

    def test_csv_format(self, runner, tmp_path):
        _write_identity_channel(tmp_path / "phi.json")
        result = runner.invoke(
            main,
            ["capacity", "--channel", str(tmp_path / "phi.json"), "--format", "csv"],
        )
        assert result.exit_code == 0
        assert result.output.startswith("iter,chi,gap,mean_energy,support_size")


class TestCertifyCommand:
    def test_optimal_true(self, runner, tmp_path):
        from chicap import Ensemble

        _write_identity_channel(tmp_path / "phi.json")
        e0 = np.diag([1.0, 0.0]).astype(complex)
        e1 = np.diag([0.0, 1.0]).astype(complex)
        pi = Ensemble([0.5, 0.5], (e0, e1))
        (tmp_path / "pi.json").write_text(
            serialize.dumps(serialize.ensemble_to_dict(pi))
        )
        result = runner.invoke(
            main,
            ["certify", "--channel", str(tmp_path / "phi.json"),
             "--ensemble", str(tmp_path / "pi.json")],
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["optimal"] is True

    def test_suboptimal_false_with_witness(self, runner, tmp_path):
        from chicap import Ensemble

        _write_identity_channel(tmp_path / "phi.json")
        e0 = np.diag([1.0, 0.0]).astype(complex)
        e1 = np.diag([0.0, 1.0]).astype(complex)
        pi = Ensemble([0.9, 0.1], (e0, e1))
        (tmp_path / "pi.json").write_text(
            serialize.dumps(serialize.ensemble_to_dict(pi))
        )
        result = runner.invoke(
            main,
            ["certify", "--channel", str(tmp_path / "phi.json"),
             "--ensemble", str(tmp_path / "pi.json")],
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["optimal"] is False
        assert "witness" in data


class TestCounterexampleCommand:
    def test_json_report(self, runner):
        result = runner.invoke(main, ["counterexample", "--nmax", "1000"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["gap"] > 0.9
        assert len(data["points"]) == 4

    def test_artifacts(self, runner, tmp_path):
        out = tmp_path / "cx.json"
        result = runner.invoke(
            main, ["counterexample", "--nmax", "1000", "--out", str(out)]
        )
        assert result.exit_code == 0
        assert out.exists()
        assert (tmp_path / "cx.csv").read_text().startswith("n,q_n,h_value")
        assert (tmp_path / "cx.png").stat().st_size > 0


class TestDiscretizeCommand:
    def test_roundtrip(self, runner, tmp_path):
        _write_ensemble(tmp_path / "mu.json", dim=2, n=8)
        result = runner.invoke(
            main,
            ["discretize", "--measure", str(tmp_path / "mu.json"),
             "--resolution", "3"],
        )
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert math.isclose(sum(data["weights"]), 1.0, abs_tol=1e-12)

    def test_bad_resolution_exit_one(self, runner, tmp_path):
        _write_ensemble(tmp_path / "mu.json")
        result = runner.invoke(
            main,
            ["discretize", "--measure", str(tmp_path / "mu.json"),
             "--resolution", "0"],
        )
        assert result.exit_code == 1


class TestIdentitiesCommand:
    def test_pass_table(self, runner):
        result = runner.invoke(main, ["identities", "--trials", "10"])
        assert result.exit_code == 0
        assert result.output.count("PASS") == 4
        assert "FAIL" not in result.output
