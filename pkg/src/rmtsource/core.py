"""Front-end-agnostic runner core containing the task dispatch."""

from __future__ import annotations

import asyncio
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

from pydantic import ValidationError

from rmtsource.config import Settings
from rmtsource.exceptions import EXIT_INVALID, EXIT_NUMERICAL, ConfigError, RMTSourceError
from rmtsource.models import RunConfig, RunResult
from rmtsource.tasks import (
    check_duality,
    draw_samples,
    evaluate_charpoly,
    evaluate_specfun,
    run_selftest,
    study_softedge,
)
from rmtsource.tasks.utils import TaskContext, TaskDefinition, TaskOutput

logger = logging.getLogger("rmtsource")

EXIT_OK = 0
EXIT_INTERNAL = 1


class RunnerCore:
    """Dispatches commands to task handlers and renders their artifacts.

    The core is independent of the front end: the CLI builds a ``RunConfig``
    and prints whatever ``run`` returns, tests call ``run`` directly.
    """

    def __init__(self, settings: Settings):
        """Initialize the runner core.

        Args:
            settings: Defaults for worker count, sample sizes and numerical limits
        """
        self.settings = settings
        self._task_handlers = self._setup_task_handlers()

    def _setup_task_handlers(self) -> Dict[str, Any]:
        """Set up the mapping of command names to their task modules."""
        return {
            "specfun": evaluate_specfun,
            "sample": draw_samples,
            "charpoly": evaluate_charpoly,
            "duality": check_duality,
            "softedge": study_softedge,
            "selftest": run_selftest,
        }

    def get_task_definitions(self) -> List[TaskDefinition]:
        """Return the list of available tasks."""
        return [module.TASK_DEFINITION for module in self._task_handlers.values()]

    async def handle_task(
        self, name: str, arguments: dict, *, seed: int = 0, workers: int = 1
    ) -> dict:
        """Run one task and convert failures into a structured result.

        Returns:
            ``{"success": True, "output": TaskOutput}`` or
            ``{"success": False, "error": ..., "type": ..., "exit_code": ...}``
        """
        try:
            handler_module = self._task_handlers.get(name)
            if handler_module is None:
                raise ConfigError(f"Unknown command: {name}")
            context = TaskContext(seed=seed, workers=workers, settings=self.settings)
            output = await handler_module.handle(context, arguments)
            return {"success": True, "output": output}

        except RMTSourceError as exc:
            logger.error("Task %s failed: %s", name, exc.message)
            return _failure(exc.message, type(exc).__name__, exc.exit_code)
        except ValidationError as exc:
            logger.warning("Task %s bad input: %s", name, exc)
            return _failure(_validation_message(exc), "ValidationError", EXIT_INVALID)
        except ValueError as exc:
            logger.warning("Task %s bad input: %s", name, exc)
            return _failure(str(exc), type(exc).__name__, EXIT_INVALID)
        except Exception as exc:
            logger.exception("Unexpected error in task %s", name)
            return _failure(f"Internal error: {exc}", type(exc).__name__, EXIT_INTERNAL)

    def render(self, output: TaskOutput, fmt: str) -> str:
        """Render a task output as indented JSON or as its CSV table."""
        if fmt == "csv":
            if output.csv is None:
                raise ConfigError("csv output is not available for this command")
            return output.csv
        return json.dumps(output.data, indent=2) + "\n"

    async def run_async(self, config: RunConfig) -> RunResult:
        """Run one configured command; see ``run``."""
        result = await self.handle_task(
            config.command, config.params, seed=config.seed, workers=config.workers
        )
        if not result["success"]:
            return RunResult(
                exit_code=result["exit_code"], error=result["error"], error_type=result["type"]
            )

        output: TaskOutput = result["output"]
        try:
            text = self.render(output, config.format)
        except ConfigError as exc:
            return RunResult(exit_code=exc.exit_code, error=exc.message, error_type="ConfigError")

        artifacts = []
        if config.output:
            path = Path(config.output)
            path.write_text(text)
            artifacts.append(str(path))
        exit_code = EXIT_OK if output.passed else EXIT_NUMERICAL
        if not output.passed:
            logger.error("Command %s finished but its check did not pass", config.command)
        return RunResult(exit_code=exit_code, text=text, artifacts=artifacts)

    def run(self, config: RunConfig) -> RunResult:
        """Exit code 0 on success, 2 on invalid input, 3 on a failed or impossible check.

        The artifact text is returned and, when ``config.output`` is set,
        also written to that file.
        """
        return asyncio.run(self.run_async(config))


def _failure(message: str, error_type: str, exit_code: int) -> dict:
    return {"success": False, "error": message, "type": error_type, "exit_code": exit_code}


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"]) or "params"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc.strerror}") from exc
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}:{number}: expected 'key = value'")
        if key in values:
            raise ConfigError(f"{path}:{number}: duplicate key '{key}'")
        values[key] = value.strip()
    return values
