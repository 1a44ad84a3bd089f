"""The charpoly task: averaged characteristic polynomial, exact and optionally sampled."""

import asyncio
from typing import Any, Literal, Optional

from pydantic import Field

from rmtsource import charpoly
from rmtsource.ensembles import make_draw
from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import ChiralSourceSpec, MCEstimate, schema_id
from rmtsource.montecarlo import LHS_STREAM, LinearFactorProduct, estimate_async
from rmtsource.tasks.utils import FloatList, TaskContext, TaskDefinition, TaskOutput, TaskParams


class CharpolyParams(TaskParams):
    model: Literal["gauss", "chiral", "wishart", "box"] = "gauss"
    method: Optional[Literal["quadrature", "combinatorial", "series", "integral"]] = None
    lam: float = Field(alias="lambda")
    N: Optional[int] = Field(default=None, ge=0)
    s: FloatList = []
    n: Optional[int] = Field(default=None, ge=0)
    p: Optional[int] = Field(default=None, ge=0)
    a: Optional[float] = None
    m: FloatList = []
    mu: FloatList = []
    beta: int = Field(default=1, ge=1, le=2)
    samples: int = Field(default=0, ge=0, description="Monte Carlo samples; 0 skips sampling")


TASK_DEFINITION = TaskDefinition(
    name="charpoly",
    description=(
        "Averaged characteristic polynomial of the shifted Gaussian ensemble (gauss), "
        "the chiral block matrix (chiral), a Wishart matrix with source (wishart), "
        "or the raw Laguerre integral (box); with samples > 0 also a Monte Carlo estimate."
    ),
    params=CharpolyParams,
)

DEFAULT_METHOD = {"gauss": "quadrature", "chiral": "series", "wishart": "integral", "box": "integral"}


def _gauss_source(params: CharpolyParams) -> list[float]:
    if params.N is None:
        return params.s
    if not params.s:
        return [0.0] * params.N
    if len(params.s) != params.N:
        raise InvalidParameterError(f"s must have length N={params.N}, got {len(params.s)}")
    return params.s


def _chiral_shape(params: CharpolyParams) -> tuple[int, int]:
    if params.n is None or params.p is None:
        raise InvalidParameterError(f"{params.model} needs 'n' and 'p'")
    return params.n, params.p


def _exact(params: CharpolyParams, context: TaskContext) -> float:
    method = params.method or DEFAULT_METHOD[params.model]
    settings = context.settings
    if params.model == "gauss":
        s = _gauss_source(params)
        if method == "quadrature":
            return charpoly.gauss_avg_quadrature(params.lam, s, len(s) + settings.hermite_extra_nodes)
        if method == "combinatorial":
            return charpoly.gauss_avg_combinatorial(params.lam, s)
    elif params.model == "chiral":
        n, p = _chiral_shape(params)
        s = params.s or [0.0] * p
        if method == "series":
            return charpoly.chiral_avg_series(params.lam, n, p, s)
        if method == "integral":
            return charpoly.chiral_avg_integral(params.lam, n, p, s, nodes=p + settings.laguerre_extra_nodes)
    elif params.model == "wishart":
        n, p = _chiral_shape(params)
        mu = params.mu or [0.0] * p
        if method == "integral":
            return charpoly.wishart_avg(params.lam, n, p, mu, nodes=p + settings.laguerre_extra_nodes)
        if method == "series":
            return charpoly.box_avg_series(params.lam, n - p, p, mu)
    else:
        if params.a is None or params.p is None:
            raise InvalidParameterError("box needs 'a' and 'p'")
        m = params.m or [0.0] * params.p
        if method == "integral":
            return charpoly.box_avg(params.lam, params.a, params.p, m, nodes=params.p + settings.laguerre_extra_nodes)
        if method == "series":
            return charpoly.box_avg_series(params.lam, params.a, params.p, m)
    raise InvalidParameterError(f"method {method!r} is not available for {params.model}")


async def _sampled(params: CharpolyParams, context: TaskContext) -> MCEstimate:
    if params.model == "gauss":
        draw = make_draw("goe" if params.beta == 1 else "gue", source=_gauss_source(params))
        statistic = LinearFactorProduct(points=[params.lam])
    elif params.model == "box":
        raise InvalidParameterError("box has no matrix model to sample")
    else:
        n, p = _chiral_shape(params)
        source = params.s if params.model == "chiral" else params.mu
        # chiral sources are singular values, the Wishart source their squares
        mu = [v * v for v in source] if params.model == "chiral" else list(source)
        spec = ChiralSourceSpec(
            n=n, p=p, field="real" if params.beta == 1 else "complex", mu=mu or [0.0] * p
        )
        draw = make_draw("wishart", chiral=spec)
        if params.model == "chiral":
            statistic = charpoly.chiral_charpoly_statistic(params.lam, n, p)
        else:
            statistic = LinearFactorProduct(points=[params.lam])
    settings = context.settings
    return await estimate_async(
        draw,
        statistic,
        params.samples,
        context.seed,
        stream=LHS_STREAM,
        workers=context.workers,
        chunk_size=settings.chunk_size,
    )


async def handle(context: TaskContext, arguments: dict) -> TaskOutput:
    """Execute the charpoly task."""
    params = CharpolyParams.model_validate(arguments)
    value = await asyncio.to_thread(_exact, params, context)
    data: dict[str, Any] = {
        "schema": schema_id("charpoly"),
        "model": params.model,
        "method": params.method or DEFAULT_METHOD[params.model],
        "params": params.model_dump(by_alias=True, exclude_none=True, exclude={"model", "method"}),
        "value": value,
    }
    if params.samples:
        data["monte_carlo"] = (await _sampled(params, context)).model_dump()
        data["seed"] = context.seed
        data["workers"] = context.workers
    return TaskOutput(data=data)
