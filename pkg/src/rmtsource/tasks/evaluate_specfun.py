"""The specfun task: evaluate one special function or Jack quantity."""

import asyncio
from typing import Any, Literal, Optional

from rmtsource import jack, specfun
from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import schema_id
from rmtsource.tasks.utils import FloatList, IntList, TaskContext, TaskDefinition, TaskOutput, TaskParams

SpecfunName = Literal[
    "hermite",
    "laguerre",
    "hyp0f1",
    "airy",
    "incomplete_airy",
    "incomplete_hermite",
    "jack",
    "dprime",
    "pochhammer",
    "hyper_0f0",
    "hyper_0f1",
    "density",
]


class SpecfunParams(TaskParams):
    function: SpecfunName
    route: Literal["closed", "contour"] = "closed"
    n: Optional[int] = None
    r: Optional[int] = None
    a: Optional[float] = None
    c: Optional[float] = None
    u: Optional[float] = None
    X: Optional[float] = None
    x: FloatList = []
    y: FloatList = []
    s: FloatList = []
    mu: FloatList = []
    kappa: IntList = []
    alpha: Optional[float] = None
    beta: Optional[float] = None
    degree: Optional[int] = None


TASK_DEFINITION = TaskDefinition(
    name="specfun",
    description=(
        "Evaluate a special function: Hermite and Laguerre polynomials in log-scaled form, "
        "0F1, Airy and incomplete Airy/Hermite functions, Jack polynomials and their "
        "hypergeometric series, or the Gaussian-with-source eigenvalue density."
    ),
    params=SpecfunParams,
)


def _need(value: Any, name: str, function: str) -> Any:
    if value is None:
        raise InvalidParameterError(f"{function} needs '{name}'")
    return value


def _scalar(values: list[float], name: str, function: str) -> float:
    if len(values) != 1:
        raise InvalidParameterError(f"{function} needs a single '{name}' value, got {len(values)}")
    return values[0]


def _complex(value: complex) -> dict[str, float]:
    value = complex(value)
    return {"re": value.real, "im": value.imag}


def _series(result: jack.SeriesResult) -> dict[str, Any]:
    return {**_complex(result.value), "tail": result.tail, "converged": result.converged, "degree": result.degree}


def _evaluate(params: SpecfunParams, context: TaskContext) -> Any:
    name = params.function
    settings = context.settings
    degree = settings.jack_degree if params.degree is None else params.degree

    if name == "hermite":
        return specfun.hermite(_need(params.n, "n", name), _scalar(params.x, "x", name)).as_dict()
    if name == "laguerre":
        p = _need(params.n, "n", name)
        return specfun.laguerre(p, _need(params.a, "a", name), _scalar(params.x, "x", name)).as_dict()
    if name == "hyp0f1":
        return _complex(specfun.hyp0f1_scalar(_need(params.c, "c", name), _scalar(params.x, "x", name)))
    if name == "airy":
        ai, aip = specfun.airy(_scalar(params.x, "x", name))
        return {"ai": ai, "ai_prime": aip}
    if name == "incomplete_airy":
        r = len(params.s) if params.r is None else params.r
        x = _need(params.X, "X", name)
        route = specfun.incomplete_airy if params.route == "closed" else specfun.incomplete_airy_contour
        return route(r, x, params.s)
    if name == "incomplete_hermite":
        n = _need(params.n, "n", name)
        r = len(params.s) if params.r is None else params.r
        u = _need(params.u, "u", name)
        if params.route == "closed":
            value = specfun.incomplete_hermite(n, r, u, params.s, table_limit=settings.hermite_table_limit)
        else:
            value = specfun.incomplete_hermite_contour(n, r, u, params.s)
        return value.as_dict()

    alpha = params.alpha
    if name in ("jack", "dprime", "pochhammer", "hyper_0f0", "hyper_0f1"):
        alpha = _need(alpha, "alpha", name)
    kappa = jack.Partition.of(*params.kappa)
    jack_context = jack.JackContext(alpha, settings.jack_max_degree) if alpha is not None else None
    if name == "jack":
        return _complex(jack.jack_poly(kappa, params.x, alpha, context=jack_context))
    if name == "dprime":
        return jack.dprime(kappa, alpha)
    if name == "pochhammer":
        return jack.gen_pochhammer(_need(params.c, "c", name), kappa, alpha)
    if name == "hyper_0f0":
        result = jack.hyper_0f0(
            params.x, params.y, alpha, degree, tolerance=settings.jack_tolerance, context=jack_context
        )
        return _series(result)
    if name == "hyper_0f1":
        result = jack.hyper_0f1(
            _need(params.c, "c", name),
            params.x,
            params.y,
            alpha,
            degree,
            tolerance=settings.jack_tolerance,
            context=jack_context,
        )
        return _series(result)
    # density
    return jack.gaussian_source_density(
        params.x, params.mu, _need(params.beta, "beta", name), degree, tolerance=settings.jack_tolerance
    )


async def handle(context: TaskContext, arguments: dict) -> TaskOutput:
    """Execute the specfun task."""
    params = SpecfunParams.model_validate(arguments)
    value = await asyncio.to_thread(_evaluate, params, context)
    return TaskOutput(
        data={
            "schema": schema_id("specfun"),
            "function": params.function,
            "params": params.model_dump(by_alias=True, exclude_none=True, exclude={"function"}),
            "value": value,
        }
    )
