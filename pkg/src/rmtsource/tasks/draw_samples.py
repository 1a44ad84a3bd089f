"""The sample task: draw eigenvalue samples from one of the source ensembles."""

import asyncio
from typing import Literal, Optional

import numpy as np
from pydantic import Field

from rmtsource.ensembles import make_draw, samples_csv_text
from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import ChiralSourceSpec, schema_id
from rmtsource.montecarlo import LHS_STREAM, shard_sizes, worker_generators
from rmtsource.tasks.utils import FloatList, TaskContext, TaskDefinition, TaskOutput, TaskParams


class SampleParams(TaskParams):
    ensemble: Literal["goe", "gue", "beta", "me", "wishart"]
    N: Optional[int] = Field(default=None, ge=1)
    beta: Optional[float] = Field(default=None, gt=0)
    s: FloatList = []
    c: Optional[float] = Field(default=None, gt=0)
    n: Optional[int] = Field(default=None, ge=1)
    p: Optional[int] = Field(default=None, ge=1)
    field: Literal["real", "complex"] = "real"
    mu: FloatList = []
    count: int = Field(default=10, ge=1)


TASK_DEFINITION = TaskDefinition(
    name="sample",
    description=(
        "Draw eigenvalue samples of a shifted GOE/GUE, the recursive β-ensemble with "
        "source, its e^{-c y²} adaptor, or a Wishart matrix with a diagonal source."
    ),
    params=SampleParams,
)

BETA_OF = {"goe": 1.0, "gue": 2.0, "wishart": 1.0}


def _source(params: SampleParams) -> list[float]:
    if params.N is None:
        return params.s
    if not params.s:
        return [0.0] * params.N
    if len(params.s) != params.N:
        raise InvalidParameterError(f"s must have length N={params.N}, got {len(params.s)}")
    return params.s


def _draw(params: SampleParams, seed: int, workers: int) -> tuple[np.ndarray, float]:
    if params.ensemble == "wishart":
        if params.n is None or params.p is None:
            raise InvalidParameterError("wishart sampling needs 'n' and 'p'")
        mu = params.mu or [0.0] * params.p
        spec = ChiralSourceSpec(n=params.n, p=params.p, field=params.field, mu=mu)
        draw = make_draw("wishart", chiral=spec)
        beta = 1.0 if params.field == "real" else 2.0
    else:
        source = _source(params)
        if not source:
            raise InvalidParameterError(f"{params.ensemble} sampling needs 'N' or 's'")
        if params.ensemble in ("goe", "gue"):
            beta = BETA_OF[params.ensemble]
        elif params.beta is None:
            raise InvalidParameterError(f"{params.ensemble} sampling needs 'beta'")
        else:
            beta = params.beta
        c = beta / 2.0 if params.c is None else params.c
        draw = make_draw(params.ensemble, beta=beta, source=source, c=c)

    generators = worker_generators(seed, LHS_STREAM, workers)
    shards = [draw(rng, size) for rng, size in zip(generators, shard_sizes(params.count, workers)) if size]
    return np.concatenate(shards, axis=0), beta


async def handle(context: TaskContext, arguments: dict) -> TaskOutput:
    """Execute the sample task."""
    params = SampleParams.model_validate(arguments)
    samples, beta = await asyncio.to_thread(_draw, params, context.seed, context.workers)
    size = samples.shape[1]
    return TaskOutput(
        data={
            "schema": schema_id("samples"),
            "ensemble": params.ensemble,
            "beta": beta,
            "N": size,
            "seed": context.seed,
            "workers": context.workers,
            "samples": samples.tolist(),
        },
        csv=samples_csv_text(params.ensemble, beta, size, context.seed, samples),
    )
