"""The duality task: run one two-sided duality check."""

from typing import Literal, Optional

from pydantic import Field

from rmtsource import duality
from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import DualityReport
from rmtsource.tasks.utils import FloatList, TaskContext, TaskDefinition, TaskOutput, TaskParams


class DualityParams(TaskParams):
    check: Literal["w2", "fr", "dr1", "dr2"]
    beta: Optional[float] = Field(default=None, gt=0)
    alpha: Optional[float] = Field(default=None, gt=0)
    N: Optional[int] = Field(default=None, ge=1)
    n: Optional[int] = Field(default=None, ge=1)
    p: Optional[int] = Field(default=None, ge=1)
    a: float = 0.0
    x: FloatList = []
    lam: Optional[float] = Field(default=None, alias="lambda")
    xi: FloatList = []
    sigma: FloatList = []
    s: FloatList = []
    m: FloatList = []
    samples: Optional[int] = Field(default=None, ge=2)
    threshold: Optional[float] = Field(default=None, gt=0)


TASK_DEFINITION = TaskDefinition(
    name="duality",
    description=(
        "Check a duality identity numerically: w2 (β ↔ 4/β moments), fr (Monte Carlo "
        "against the Gaussian closed form), dr1 (source duality on the imaginary slice) "
        "or dr2 (chiral source duality). Reports a z-score and a pass flag."
    ),
    params=DualityParams,
)


def _need(value, name: str, check: str):
    if value is None:
        raise InvalidParameterError(f"{check} check needs '{name}'")
    return value


async def _run(params: DualityParams, context: TaskContext) -> DualityReport:
    settings = context.settings
    common = {
        "seed": context.seed,
        "workers": context.workers,
        "chunk_size": settings.chunk_size,
        "threshold": settings.z_threshold if params.threshold is None else params.threshold,
    }
    samples = settings.samples if params.samples is None else params.samples
    check = params.check
    if check == "w2":
        if len(params.x) != 1:
            raise InvalidParameterError("w2 check needs a single 'x' value")
        return await duality.check_w2(
            _need(params.beta, "beta", check),
            _need(params.N, "N", check),
            _need(params.n, "n", check),
            params.x[0],
            samples,
            **common,
        )
    if check == "fr":
        return await duality.check_fr(
            _need(params.beta, "beta", check),
            _need(params.N, "N", check),
            params.x,
            _need(params.lam, "lambda", check),
            samples,
            **common,
        )
    if check == "dr1":
        return await duality.check_dr1(
            _need(params.alpha, "alpha", check),
            _need(params.N, "N", check),
            _need(params.n, "n", check),
            params.xi,
            params.sigma,
            samples,
            **common,
        )
    beta = _need(params.beta, "beta", check)
    if not float(beta).is_integer():
        raise InvalidParameterError(f"dr2 check needs beta in {{1, 2}}, got {beta}")
    return await duality.check_dr2(
        int(beta),
        _need(params.n, "n", check),
        _need(params.p, "p", check),
        params.a,
        params.s,
        params.m,
        samples,
        **common,
    )


async def handle(context: TaskContext, arguments: dict) -> TaskOutput:
    """Execute the duality task."""
    params = DualityParams.model_validate(arguments)
    report = await _run(params, context)
    return TaskOutput(data=report.to_json_dict(), passed=report.passed)
