"""Soft-edge scaling studies.

Each study evaluates a finite-size averaged characteristic polynomial at
the soft edge, normalised so that it tends to an Airy-type limit, and
reports both numbers as a ``ConvergenceRow``. Every finite-size value is
assembled in ``ScaledValue`` arithmetic and decoded only once at the end.
"""

from __future__ import annotations

import asyncio
import csv
import io
import math
from typing import Any, Literal, Sequence

from rmtsource.charpoly import box_avg_series_scaled, incomplete_hermite_form
from rmtsource.exceptions import InvalidParameterError
from rmtsource.logging import get_logger
from rmtsource.models import ConvergenceRow, schema_id
from rmtsource.specfun import airy, hermite, incomplete_airy, laguerre

logger = get_logger("scaling")

ScalingOp = Literal["classic", "gauss", "chiral", "szego"]


# ---------------------------------------------------------------------------
# Normalisations (all as natural logs)
# ---------------------------------------------------------------------------


def classic_normalization(n: int) -> float:
    """log C_N^{(1)} = log(π^{1/4} 2^{-N/2+1/4} (N!)^{1/2} N^{-1/12})."""
    return (
        0.25 * math.log(math.pi)
        + (-n / 2.0 + 0.25) * math.log(2.0)
        + 0.5 * math.lgamma(n + 1)
        - math.log(n) / 12.0
    )


def gauss_edge_normalization(n: int, r: int) -> float:
    """log C_N^{(r+1)} = log(√π 2^{-(N-1)/2} N^{(N+1)/2-(r+1)/3} e^{-N/2})."""
    return (
        0.5 * math.log(math.pi)
        - 0.5 * (n - 1) * math.log(2.0)
        + ((n + 1) / 2.0 - (r + 1) / 3.0) * math.log(n)
        - n / 2.0
    )


def chiral_edge_normalization(p: int, a: float) -> float:
    """log D_p^{(2)} = log((p-1)! (2p)^{1/3} 2^{-a})."""
    return math.lgamma(p) + math.log(2.0 * p) / 3.0 - a * math.log(2.0)


def stirling_conversion(n: int) -> float:
    """(N!)^{1/2} / ((2πN)^{1/4} (N/e)^{N/2}), the ratio of the two C_N^{(1)} forms."""
    return math.exp(
        0.5 * math.lgamma(n + 1) - 0.25 * math.log(2.0 * math.pi * n) - 0.5 * n * (math.log(n) - 1.0)
    )


# ---------------------------------------------------------------------------
# Studies
# ---------------------------------------------------------------------------


def classic_airy_limit(n: int, y: float) -> ConvergenceRow:
    """e^{-λ²/2} 2^{-N} H_N(λ) / C_N^{(1)} at λ = √(2N) + y/(√2 N^{1/6}), against Ai(y)."""
    if n < 4:
        raise InvalidParameterError(f"classic Airy study needs N >= 4, got {n}")
    lam = math.sqrt(2.0 * n) + y / (math.sqrt(2.0) * n ** (1.0 / 6.0))
    value = hermite(n, lam).scale(-0.5 * lam * lam - n * math.log(2.0) - classic_normalization(n))
    return ConvergenceRow.build(n, y, [], value.to_float(), airy(y)[0])


def gauss_soft_edge(n: int, r: int, x: float, s: Sequence[float]) -> ConvergenceRow:
    """Gaussian ensemble with r scaled sources against (-1)^{r+1} Ai^{(r+1)}(X, {s_k}).

    Sources x_k = √(N/2) - N^{1/6} s_k/√2 and λ = √(2N) + X/(√2 N^{1/6}).
    The finite value is e^{-λ²/2}/C_N^{(r+1)} times the averaged
    characteristic polynomial; studied for r <= 3.
    """
    s = [float(v) for v in s]
    if len(s) != r:
        raise InvalidParameterError(f"expected {r} scaled sources, got {len(s)}")
    if r < 0 or r > n:
        raise InvalidParameterError(f"need 0 <= r <= N, got r={r}, N={n}")
    sixth = n ** (1.0 / 6.0)
    lam = math.sqrt(2.0 * n) + x / (math.sqrt(2.0) * sixth)
    sources = [math.sqrt(n / 2.0) - sixth * sk / math.sqrt(2.0) for sk in s]
    average = incomplete_hermite_form(lam, n, sources)
    value = average.scale(-0.5 * lam * lam - gauss_edge_normalization(n, r))
    return ConvergenceRow.build(n, x, s, value.to_float(), incomplete_airy(r, x, s))


def chiral_soft_edge(p: int, a: float, x: float, s1: float) -> ConvergenceRow:
    """Chiral ensemble with one scaled source against s₁Ai(X) - Ai'(X).

    λ = 4p + 2a + 2 + 2(2p)^{1/3} X and m₁ = p - (2p)^{2/3} s₁, all other
    m_k zero; the Laguerre values come damped by e^{-λ/2}.
    """
    if p < 2:
        raise InvalidParameterError(f"chiral soft-edge study needs p >= 2, got {p}")
    third = (2.0 * p) ** (1.0 / 3.0)
    lam = 4.0 * p + 2.0 * a + 2.0 + 2.0 * third * x
    m1 = p - third * third * s1
    m = [m1] + [0.0] * (p - 1)
    average = box_avg_series_scaled(lam, a, p, m, damped=True)
    value = average.scale(-chiral_edge_normalization(p, a))
    return ConvergenceRow.build(p, x, [s1], value.to_float(), incomplete_airy(1, x, [s1]))


def szego_check(p: int, a: float, k: int, x: float) -> ConvergenceRow:
    """e^{-λ/2}(-1)^{p+k} L_{p+k}^a(λ) against 2^{-a-1/3} p^{-1/3}(Ai(X) - 2k(2p)^{-1/3} Ai'(X)).

    λ as in ``chiral_soft_edge``; the residual is O(p^{-2/3}) relative.
    The row's ``s`` field carries k.
    """
    if abs(k) > 2:
        raise InvalidParameterError(f"need |k| <= 2, got {k}")
    if p + k < 0:
        raise InvalidParameterError(f"p + k must be >= 0, got {p + k}")
    third = (2.0 * p) ** (1.0 / 3.0)
    lam = 4.0 * p + 2.0 * a + 2.0 + 2.0 * third * x
    value = laguerre(p + k, a, lam, damped=True)
    if (p + k) % 2:
        value = -value
    ai, aip = airy(x)
    limit = 2.0 ** (-a - 1.0 / 3.0) * p ** (-1.0 / 3.0) * (ai - 2.0 * k / third * aip)
    return ConvergenceRow.build(p, x, [float(k)], value.to_float(), limit)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


def _study(op: ScalingOp, size: int, point: dict[str, Any]) -> ConvergenceRow:
    if op == "classic":
        return classic_airy_limit(size, point["X"])
    if op == "gauss":
        s = list(point.get("s", []))
        return gauss_soft_edge(size, len(s), point["X"], s)
    if op == "chiral":
        return chiral_soft_edge(size, point.get("a", 0.0), point["X"], point.get("s1", 0.0))
    if op == "szego":
        return szego_check(size, point.get("a", 0.0), point.get("k", 0), point["X"])
    raise InvalidParameterError(f"unknown scaling study {op!r}")


async def convergence_table_async(
    op: ScalingOp,
    sizes: Sequence[int],
    points: Sequence[dict[str, Any]],
    *,
    workers: int = 1,
) -> list[ConvergenceRow]:
    """One row per (size, point), in ``sizes × points`` order."""
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    semaphore = asyncio.Semaphore(workers)

    async def run(size: int, point: dict[str, Any]) -> ConvergenceRow:
        async with semaphore:
            return await asyncio.to_thread(_study, op, size, point)

    tasks = [run(size, point) for size in sizes for point in points]
    rows = await asyncio.gather(*tasks)
    logger.debug(f"{op} table: {len(rows)} rows")
    return list(rows)


def convergence_table(
    op: ScalingOp,
    sizes: Sequence[int],
    points: Sequence[dict[str, Any]],
    *,
    workers: int = 1,
) -> list[ConvergenceRow]:
    """Blocking form of ``convergence_table_async``."""
    return asyncio.run(convergence_table_async(op, sizes, points, workers=workers))


def _format(value: float | None) -> str:
    return "" if value is None else format(float(value), ".17g")


def convergence_csv_text(rows: Sequence[ConvergenceRow]) -> str:
    """``size,X,s1..sr,finite,limit,abs_error`` with a schema comment line."""
    width = max((len(row.s) for row in rows), default=0)
    buffer = io.StringIO()
    buffer.write(f"# schema: {schema_id('convergence')}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["size", "X", *[f"s{j + 1}" for j in range(width)], "finite", "limit", "abs_error"])
    for row in rows:
        padded = list(row.s) + [None] * (width - len(row.s))
        writer.writerow(
            [
                row.size,
                _format(row.X),
                *[_format(v) for v in padded],
                _format(row.finite_value),
                _format(row.limit_value),
                _format(row.abs_error),
            ]
        )
    return buffer.getvalue()
