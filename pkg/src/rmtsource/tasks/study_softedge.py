"""The softedge task: finite-size convergence towards the Airy-type limits."""

from typing import Any, Literal, Optional

from pydantic import Field

from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import schema_id
from rmtsource.scaling import convergence_csv_text, convergence_table_async
from rmtsource.tasks.utils import FloatList, IntList, TaskContext, TaskDefinition, TaskOutput, TaskParams


class SoftedgeParams(TaskParams):
    which: Literal["classic", "gauss", "chiral", "szego"]
    sizes: IntList = Field(min_length=1)
    X: FloatList = [0.0]
    r: Optional[int] = Field(default=None, ge=0)
    s: FloatList = []
    s1: FloatList = [0.0]
    a: float = 0.0
    k: int = 0


TASK_DEFINITION = TaskDefinition(
    name="softedge",
    description=(
        "Tabulate finite-size values against their soft-edge limits: classic (Hermite to Ai), "
        "gauss (r scaled sources), chiral (one scaled source) or szego (Laguerre asymptotics). "
        "One row per size and grid point."
    ),
    params=SoftedgeParams,
)


def _points(params: SoftedgeParams) -> list[dict[str, Any]]:
    if params.which == "gauss":
        r = len(params.s) if params.r is None else params.r
        if len(params.s) != r:
            raise InvalidParameterError(f"gauss study with r={r} needs {r} values in 's'")
        return [{"X": x, "s": list(params.s)} for x in params.X]
    if params.which == "chiral":
        return [{"X": x, "s1": s1, "a": params.a} for x in params.X for s1 in params.s1]
    if params.which == "szego":
        return [{"X": x, "k": params.k, "a": params.a} for x in params.X]
    return [{"X": x} for x in params.X]


async def handle(context: TaskContext, arguments: dict) -> TaskOutput:
    """Execute the softedge task."""
    params = SoftedgeParams.model_validate(arguments)
    rows = await convergence_table_async(
        params.which, params.sizes, _points(params), workers=context.workers
    )
    return TaskOutput(
        data={
            "schema": schema_id("convergence"),
            "which": params.which,
            "params": params.model_dump(exclude={"which"}),
            "rows": [row.model_dump() for row in rows],
        },
        csv=convergence_csv_text(rows),
    )
