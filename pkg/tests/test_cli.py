"""Unit tests for the rmtsource CLI."""

import json

import pytest
from click.testing import CliRunner

from rmtsource import __version__
from rmtsource.cli.main import cli


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def cli_runner(monkeypatch):
    """Create a Click CLI runner with quiet logging and no inherited defaults."""
    monkeypatch.setenv("RMTSOURCE_LOG_LEVEL", "CRITICAL")
    monkeypatch.delenv("RMTSOURCE_SEED", raising=False)
    monkeypatch.delenv("RMTSOURCE_WORKERS", raising=False)
    return CliRunner()


def _error(result) -> dict:
    return json.loads(result.stderr)


# ---------------------------------------------------------------------------
# Test: charpoly
# ---------------------------------------------------------------------------


class TestCharpoly:
    def test_gauss_value(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--gauss", "--N", "2", "--s", "0,0", "--lambda", "1"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data["model"] == "gauss"
        assert data["method"] == "quadrature"
        assert data["value"] == pytest.approx(0.5, rel=1e-12)

    def test_combinatorial_method(self, cli_runner):
        result = cli_runner.invoke(
            cli,
            ["charpoly", "--gauss", "--method", "combinatorial", "--s", "0.7,-0.7,0", "--lambda", "0.3"],
        )
        assert result.exit_code == 0
        assert json.loads(result.stdout)["method"] == "combinatorial"

    def test_chiral_switch(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--chiral", "--n", "3", "--p", "2", "--lambda", "0.5"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["model"] == "chiral"

    def test_two_model_switches(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--gauss", "--box", "--lambda", "1"])
        assert result.exit_code == 2
        assert _error(result)["type"] == "ConfigError"

    def test_wrong_source_length(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--N", "3", "--s", "1,2", "--lambda", "0"])
        assert result.exit_code == 2
        error = _error(result)
        assert error["type"] == "InvalidParameterError"
        assert error["exit_code"] == 2

    def test_missing_lambda(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--N", "2"])
        assert result.exit_code == 2
        assert "lambda" in _error(result)["error"]

    def test_non_numeric_value(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--N", "two", "--lambda", "1"])
        assert result.exit_code == 2
        assert _error(result)["type"] == "ValidationError"


# ---------------------------------------------------------------------------
# Test: sample
# ---------------------------------------------------------------------------


class TestSample:
    ARGS = ["sample", "--ensemble", "goe", "--N", "3", "--count", "5", "--seed", "7", "--workers", "2"]

    def test_repeat_runs_are_byte_identical(self, cli_runner):
        first = cli_runner.invoke(cli, self.ARGS)
        second = cli_runner.invoke(cli, self.ARGS)
        assert first.exit_code == 0
        assert first.stdout == second.stdout
        data = json.loads(first.stdout)
        assert data["seed"] == 7
        assert data["workers"] == 2
        assert len(data["samples"]) == 5

    def test_seed_changes_output(self, cli_runner):
        first = cli_runner.invoke(cli, self.ARGS)
        other = cli_runner.invoke(cli, [*self.ARGS[:-4], "--seed", "8", "--workers", "2"])
        assert first.stdout != other.stdout

    def test_csv_format(self, cli_runner):
        result = cli_runner.invoke(cli, [*self.ARGS, "--format", "csv"])
        assert result.exit_code == 0
        assert result.stdout.startswith("#")

    def test_output_file(self, cli_runner, tmp_path):
        target = tmp_path / "samples.json"
        result = cli_runner.invoke(cli, [*self.ARGS, "--output", str(target)])
        assert result.exit_code == 0
        assert result.stdout == ""
        assert json.loads(target.read_text())["N"] == 3


# ---------------------------------------------------------------------------
# Test: config file
# ---------------------------------------------------------------------------


class TestConfigFile:
    def test_flags_override_file(self, cli_runner, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("model = gauss\nN = 2\ns = 0, 0\nlambda = 3\n")
        result = cli_runner.invoke(cli, ["charpoly", "--config", str(path), "--lambda", "1"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["value"] == pytest.approx(0.5, rel=1e-12)

    def test_run_keys_from_file(self, cli_runner, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("ensemble = gue\nN = 2\ncount = 3\nseed = 5\nworkers = 2\n")
        from_file = cli_runner.invoke(cli, ["sample", "--config", str(path)])
        from_flags = cli_runner.invoke(
            cli, ["sample", "--ensemble", "gue", "--N", "2", "--count", "3", "--seed", "5", "--workers", "2"]
        )
        assert from_file.exit_code == 0
        assert from_file.stdout == from_flags.stdout

    def test_unknown_key(self, cli_runner, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("N = 2\nlambda = 1\ncolour = red\n")
        result = cli_runner.invoke(cli, ["charpoly", "--config", str(path)])
        assert result.exit_code == 2
        error = _error(result)
        assert error["type"] == "ValidationError"
        assert "colour" in error["error"]

    def test_malformed_file(self, cli_runner, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("N: 2\n")
        result = cli_runner.invoke(cli, ["charpoly", "--config", str(path)])
        assert result.exit_code == 2
        assert _error(result)["type"] == "ConfigError"

    def test_negative_seed(self, cli_runner):
        result = cli_runner.invoke(cli, ["charpoly", "--N", "1", "--lambda", "1", "--seed", "-1"])
        assert result.exit_code == 2


# ---------------------------------------------------------------------------
# Test: softedge, specfun, duality, selftest
# ---------------------------------------------------------------------------


class TestOtherCommands:
    def test_softedge_csv(self, cli_runner):
        result = cli_runner.invoke(
            cli, ["softedge", "--which", "classic", "--sizes", "50,100", "--X", "0,1", "--format", "csv"]
        )
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0].startswith("# schema:")
        assert lines[1] == "size,X,finite,limit,abs_error"
        assert len(lines) == 2 + 4

    def test_softedge_json(self, cli_runner):
        result = cli_runner.invoke(
            cli, ["softedge", "--which", "classic", "--sizes", "200", "--X", "0", "--format", "json"]
        )
        assert result.exit_code == 0
        row = json.loads(result.stdout)["rows"][0]
        assert row["abs_error"] <= 0.025

    def test_softedge_defaults_to_csv(self, cli_runner):
        result = cli_runner.invoke(
            cli, ["softedge", "--which", "gauss", "--r", "1", "--X", "0", "--s", "0", "--sizes", "50,100,200"]
        )
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[1] == "size,X,s1,finite,limit,abs_error"
        assert [line.split(",")[0] for line in lines[2:]] == ["50", "100", "200"]

    def test_softedge_format_from_config_file(self, cli_runner, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("which = classic\nsizes = 50\nformat = json\n")
        result = cli_runner.invoke(cli, ["softedge", "--config", str(path)])
        assert result.exit_code == 0
        assert len(json.loads(result.stdout)["rows"]) == 1

    def test_specfun_airy(self, cli_runner):
        result = cli_runner.invoke(cli, ["specfun", "--function", "airy", "--x", "0"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["function"] == "airy"

    def test_specfun_invalid_choice(self, cli_runner):
        result = cli_runner.invoke(cli, ["specfun", "--function", "bessel"])
        assert result.exit_code == 2

    def test_failed_duality_exits_three(self, cli_runner):
        result = cli_runner.invoke(
            cli,
            [
                "duality",
                "--check",
                "fr",
                "--beta",
                "2",
                "--N",
                "2",
                "--x",
                "0.5,-0.5",
                "--lambda",
                "0.3",
                "--samples",
                "200",
                "--threshold",
                "1e-12",
            ],
        )
        assert result.exit_code == 3
        assert json.loads(result.stdout)["pass"] is False
        assert _error(result)["type"] == "CheckFailedError"

    @pytest.mark.slow
    def test_fr_duality_at_beta_three_passes(self, cli_runner):
        result = cli_runner.invoke(
            cli,
            [
                "duality",
                "--check",
                "fr",
                "--beta",
                "3",
                "--N",
                "3",
                "--x",
                "0.7,-0.7,0",
                "--lambda",
                "1.2",
                "--samples",
                "100000",
                "--seed",
                "7",
            ],
        )
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data["pass"] is True
        assert data["imag_z"] == 0.0

    def test_selftest_subset(self, cli_runner):
        result = cli_runner.invoke(cli, ["selftest", "--modules", "jack"])
        assert result.exit_code == 0
        data = json.loads(result.stdout)
        assert data["modules"] == {"jack": True}

    def test_version(self, cli_runner):
        result = cli_runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.stdout
