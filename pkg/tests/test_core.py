"""Unit tests for the RunnerCore class."""

import json
from unittest.mock import AsyncMock

import pytest

from rmtsource.core import EXIT_INTERNAL, load_config_file
from rmtsource.exceptions import ConfigError, NumericalError
from rmtsource.models import RunConfig, schema_id
from rmtsource.tasks.utils import TaskOutput


class TestRunnerCore:
    def test_initialization(self, core, settings):
        assert core.settings == settings
        assert set(core._task_handlers) == {
            "specfun",
            "sample",
            "charpoly",
            "duality",
            "softedge",
            "selftest",
        }

    def test_get_task_definitions(self, core):
        definitions = core.get_task_definitions()
        names = [definition.name for definition in definitions]
        assert sorted(names) == sorted(core._task_handlers)
        for definition in definitions:
            assert definition.description
            assert definition.input_schema["type"] == "object"

    def test_charpoly_schema_uses_lambda_alias(self, core):
        definition = next(d for d in core.get_task_definitions() if d.name == "charpoly")
        assert "lambda" in definition.input_schema["properties"]

    @pytest.mark.asyncio
    async def test_handle_task_success(self, core):
        result = await core.handle_task(
            "charpoly", {"model": "gauss", "N": 2, "s": "0,0", "lambda": 1.0}
        )
        assert result["success"] is True
        output = result["output"]
        assert output.data["value"] == pytest.approx(0.5, rel=1e-12)
        assert output.passed is True

    @pytest.mark.asyncio
    async def test_handle_task_unknown_command(self, core):
        result = await core.handle_task("unknown", {})
        assert result["success"] is False
        assert result["type"] == "ConfigError"
        assert result["exit_code"] == 2
        assert "Unknown command: unknown" in result["error"]

    @pytest.mark.asyncio
    async def test_handle_task_unknown_parameter(self, core):
        result = await core.handle_task("charpoly", {"lambda": 1.0, "colour": "red"})
        assert result["success"] is False
        assert result["type"] == "ValidationError"
        assert result["exit_code"] == 2
        assert "colour" in result["error"]

    @pytest.mark.asyncio
    async def test_handle_task_invalid_parameter(self, core):
        result = await core.handle_task(
            "charpoly", {"model": "gauss", "N": 3, "s": "1,2", "lambda": 0.0}
        )
        assert result["success"] is False
        assert result["type"] == "InvalidParameterError"
        assert result["exit_code"] == 2

    @pytest.mark.asyncio
    async def test_handle_task_numerical_error(self, core):
        handler = AsyncMock()
        handler.handle.side_effect = NumericalError("series diverged")
        core._task_handlers["specfun"] = handler

        result = await core.handle_task("specfun", {})

        assert result["success"] is False
        assert result["exit_code"] == 3
        assert result["error"] == "series diverged"

    @pytest.mark.asyncio
    async def test_handle_task_value_error(self, core):
        handler = AsyncMock()
        handler.handle.side_effect = ValueError("Invalid arguments")
        core._task_handlers["specfun"] = handler

        result = await core.handle_task("specfun", {})

        assert result["success"] is False
        assert result["exit_code"] == 2
        assert "Invalid arguments" in result["error"]

    @pytest.mark.asyncio
    async def test_handle_task_unexpected_error(self, core):
        handler = AsyncMock()
        handler.handle.side_effect = RuntimeError("boom")
        core._task_handlers["specfun"] = handler

        result = await core.handle_task("specfun", {})

        assert result["success"] is False
        assert result["exit_code"] == EXIT_INTERNAL
        assert "Internal error" in result["error"]

    def test_render_json(self, core):
        text = core.render(TaskOutput(data={"b": 1, "a": [1.5, 2]}), "json")
        assert text.endswith("\n")
        assert json.loads(text) == {"b": 1, "a": [1.5, 2]}

    def test_render_csv(self, core):
        assert core.render(TaskOutput(data={}, csv="N,value\n2,0.5\n"), "csv") == "N,value\n2,0.5\n"

    def test_render_csv_unavailable(self, core):
        with pytest.raises(ConfigError):
            core.render(TaskOutput(data={}), "csv")


class TestRun:
    def test_run_writes_output_file(self, core, tmp_path):
        target = tmp_path / "charpoly.json"
        config = RunConfig(
            command="charpoly",
            params={"N": 2, "s": "0,0", "lambda": 1.0},
            output=str(target),
        )
        result = core.run(config)
        assert result.exit_code == 0
        assert result.artifacts == [str(target)]
        assert target.read_text() == result.text
        assert json.loads(result.text)["schema"] == schema_id("charpoly")

    def test_run_is_deterministic(self, core):
        config = RunConfig(
            command="sample",
            params={"ensemble": "goe", "N": 3, "count": 4},
            seed=11,
            workers=2,
        )
        assert core.run(config).text == core.run(config).text

    def test_run_csv_not_available(self, core):
        config = RunConfig(command="charpoly", params={"lambda": 1.0, "N": 1}, format="csv")
        result = core.run(config)
        assert result.exit_code == 2
        assert result.error_type == "ConfigError"

    def test_failed_check_exits_three(self, core):
        handler = AsyncMock()
        handler.handle.return_value = TaskOutput(data={"pass": False}, passed=False)
        core._task_handlers["duality"] = handler

        result = core.run(RunConfig(command="duality"))

        assert result.exit_code == 3
        assert result.error is None
        assert json.loads(result.text) == {"pass": False}


class TestLoadConfigFile:
    def test_parses_keys_and_comments(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# a comment\nN = 2\n\ns = 0.5, -0.5  # trailing\nlambda=1\n")
        assert load_config_file(path) == {"N": "2", "s": "0.5, -0.5", "lambda": "1"}

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("N 2\n")
        with pytest.raises(ConfigError, match="expected 'key = value'"):
            load_config_file(path)

    def test_duplicate_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("N = 2\nN = 3\n")
        with pytest.raises(ConfigError, match="duplicate key 'N'"):
            load_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read config file"):
            load_config_file(tmp_path / "absent.cfg")
