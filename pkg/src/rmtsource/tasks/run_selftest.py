"""The selftest task: the fast invariant suite."""

import asyncio
from typing import Optional

from pydantic import field_validator

from rmtsource.selftest import CHECKS, run_selftest
from rmtsource.tasks.utils import StrList, TaskContext, TaskDefinition, TaskOutput, TaskParams


class SelftestParams(TaskParams):
    modules: Optional[StrList] = None

    @field_validator("modules")
    @classmethod
    def _known(cls, modules: Optional[list[str]]) -> Optional[list[str]]:
        if modules is None:
            return None
        unknown = sorted(set(modules) - set(CHECKS))
        if unknown:
            raise ValueError(f"unknown modules: {', '.join(unknown)}")
        return modules


TASK_DEFINITION = TaskDefinition(
    name="selftest",
    description="Run the fast invariant checks of every numerical module and report pass/fail per module.",
    params=SelftestParams,
)


async def handle(context: TaskContext, arguments: dict) -> TaskOutput:
    """Execute the selftest task."""
    params = SelftestParams.model_validate(arguments)
    report = await asyncio.to_thread(
        run_selftest, context.seed, context.workers, modules=params.modules
    )
    return TaskOutput(data=report.to_json_dict(), passed=report.passed)
