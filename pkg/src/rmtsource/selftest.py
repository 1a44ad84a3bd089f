"""Fast invariant suite, one group of checks per numerical module.

Every check is a plain callable ``(seed, workers) -> str`` that raises
``AssertionError`` (or any package error) on failure and returns a short
detail string on success. Monte Carlo checks draw a few thousand samples.
"""

from __future__ import annotations

import asyncio
import math
from typing import Callable

import numpy as np

from rmtsource import charpoly, duality, ensembles, jack, montecarlo, scaling, specfun
from rmtsource.logging import get_logger
from rmtsource.models import CheckVerdict, SelftestReport

logger = get_logger("selftest")

Check = Callable[[int, int], str]


def _close(value: float, expected: float, rel: float, abs_tol: float = 0.0) -> None:
    if not math.isclose(value, expected, rel_tol=rel, abs_tol=abs_tol):
        raise AssertionError(f"{value!r} != {expected!r} (rel {rel})")


# ---------------------------------------------------------------------------
# specfun
# ---------------------------------------------------------------------------


def _hermite_value(seed: int, workers: int) -> str:
    value = specfun.hermite(5, 1.0).to_float()
    _close(value, 32.0 - 160.0 + 120.0, 1e-14)
    return f"H5(1) = {value:g}"


def _airy_origin(seed: int, workers: int) -> str:
    ai, aip = specfun.airy(0.0)
    _close(ai, 0.35502805388781723926, 1e-13)
    _close(aip, -0.25881940379280679840, 1e-13)
    return "Ai(0), Ai'(0)"


def _incomplete_airy_routes(seed: int, workers: int) -> str:
    s = [0.3, -0.8]
    closed = specfun.incomplete_airy(2, 0.4, s)
    contour = specfun.incomplete_airy_contour(2, 0.4, s)
    _close(closed, contour, 1e-8, 1e-10)
    return f"r=2 routes agree ({closed:.6g})"


def _incomplete_hermite_routes(seed: int, workers: int) -> str:
    a = [0.5, -1.0]
    expansion = specfun.incomplete_hermite(10, 2, 1.3, a).to_float()
    contour = specfun.incomplete_hermite_contour(10, 2, 1.3, a).to_float()
    _close(expansion, contour, 1e-8)
    return "N=10, r=2 routes agree"


# ---------------------------------------------------------------------------
# jack
# ---------------------------------------------------------------------------


def _schur_at_alpha_one(seed: int, workers: int) -> str:
    x = np.array([0.3, -1.2, 0.7])
    x1, x2, x3 = x
    schur = (
        x1 * x1 * (x2 + x3) + x2 * x2 * (x1 + x3) + x3 * x3 * (x1 + x2) + 2 * x1 * x2 * x3
    )
    value = complex(jack.jack_poly(jack.Partition.of(2, 1), x, 1.0)).real
    _close(value, schur, 1e-12, 1e-14)
    return "P_(2,1) = s_(2,1)"


def _single_variable_0f0(seed: int, workers: int) -> str:
    result = jack.hyper_0f0([0.8], [0.5], 2.0, degree=25)
    _close(complex(result.value).real, math.exp(0.4), 1e-12)
    return "0F0(x; y) = e^{xy} for N=1"


def _dprime_row(seed: int, workers: int) -> str:
    alpha = 1.5
    for k in range(1, 7):
        _close(jack.dprime(jack.Partition.of(k), alpha), alpha**k * math.factorial(k), 1e-12)
    return "d'_(k) = α^k k!"


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------


def _recursive_sampler(seed: int, workers: int) -> str:
    rng = np.random.default_rng(seed)
    rows = ensembles.draw_beta_gaussian_source(rng, 3.0, [0.5, 0.0, -0.5, 1.0], 2000)
    if not np.all(np.diff(rows, axis=1) >= 0):
        raise AssertionError("rows are not sorted")
    return "2000 recursive draws, interlacing and trace checked"


def _shifted_goe_mean(seed: int, workers: int) -> str:
    rng = np.random.default_rng(seed)
    rows = ensembles.draw_shifted_goe(rng, [1.0, -1.0], 4000)
    trace = rows.sum(axis=1)
    # trace ~ N(0, 2) around the source trace 0
    if abs(trace.mean()) > 4 * math.sqrt(2.0 / trace.size):
        raise AssertionError(f"mean trace {trace.mean():.4f}")
    return "trace of the shifted GOE is centred"


# ---------------------------------------------------------------------------
# montecarlo
# ---------------------------------------------------------------------------


def _merge_is_associative(seed: int, workers: int) -> str:
    rng = np.random.default_rng(seed)
    samples = rng.normal(size=(600, 3))
    statistic = montecarlo.LinearFactorProduct(points=[0.4])
    whole = montecarlo.accumulate(samples, statistic).estimate()
    parts = [montecarlo.accumulate(chunk, statistic) for chunk in np.array_split(samples, 3)]
    merged = parts[0].merge(parts[1]).merge(parts[2]).estimate()
    _close(merged.re, whole.re, 1e-12, 1e-15)
    _close(merged.se, whole.se, 1e-10)
    return "sharded merge equals one pass"


# ---------------------------------------------------------------------------
# charpoly
# ---------------------------------------------------------------------------


def _gauss_routes(seed: int, workers: int) -> str:
    rng = np.random.default_rng(seed)
    for _ in range(10):
        s = rng.uniform(-1.0, 1.0, size=6)
        lam = rng.uniform(-2.0, 2.0)
        _close(charpoly.gauss_avg_combinatorial(lam, s), charpoly.gauss_avg_quadrature(lam, s), 1e-10, 1e-12)
    return "combinatorial = quadrature on 10 draws"


def _chiral_routes(seed: int, workers: int) -> str:
    s = [0.4, 1.1, -0.3]
    series = charpoly.chiral_avg_series(1.7, 5, 3, s)
    integral = charpoly.chiral_avg_integral(1.7, 5, 3, s)
    _close(series, integral, 1e-8, 1e-10)
    return "chiral series = integral"


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------


def _fr_small(seed: int, workers: int) -> str:
    report = asyncio.run(duality.check_fr(2.0, 2, [0.7, 0.0], 0.3, 4000, seed=seed, workers=workers))
    if not report.passed:
        raise AssertionError(f"fr z={report.z:.3f}")
    return f"fr z={report.z:.3f}"


def _dr2_single_row(seed: int, workers: int) -> str:
    report = asyncio.run(duality.check_dr2(2, 1, 2, 1, [0.5], [0.4, 1.2], 4000, seed=seed, workers=workers))
    if not report.passed:
        raise AssertionError(f"dr2 z={report.z:.3f}")
    return f"dr2 z={report.z:.3f}"


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


def _stirling_link(seed: int, workers: int) -> str:
    gauss = scaling.gauss_soft_edge(60, 0, 0.2, []).finite_value
    classic = scaling.classic_airy_limit(60, 0.2).finite_value
    _close(gauss, classic * scaling.stirling_conversion(60), 1e-6)
    return "r=0 soft edge is the classic limit"


def _chiral_origin(seed: int, workers: int) -> str:
    row = scaling.chiral_soft_edge(200, 0.0, 0.0, 0.0)
    if row.abs_error > 0.05:
        raise AssertionError(f"abs_error {row.abs_error:.4f}")
    return f"p=200 error {row.abs_error:.4f}"


CHECKS: dict[str, list[tuple[str, Check]]] = {
    "specfun": [
        ("hermite_value", _hermite_value),
        ("airy_origin", _airy_origin),
        ("incomplete_airy_routes", _incomplete_airy_routes),
        ("incomplete_hermite_routes", _incomplete_hermite_routes),
    ],
    "jack": [
        ("schur_at_alpha_one", _schur_at_alpha_one),
        ("single_variable_0f0", _single_variable_0f0),
        ("dprime_row", _dprime_row),
    ],
    "ensembles": [
        ("recursive_sampler", _recursive_sampler),
        ("shifted_goe_mean", _shifted_goe_mean),
    ],
    "montecarlo": [("merge_is_associative", _merge_is_associative)],
    "charpoly": [
        ("gauss_routes", _gauss_routes),
        ("chiral_routes", _chiral_routes),
    ],
    "duality": [
        ("fr_small", _fr_small),
        ("dr2_single_row", _dr2_single_row),
    ],
    "scaling": [
        ("stirling_link", _stirling_link),
        ("chiral_origin", _chiral_origin),
    ],
}


def run_selftest(
    seed: int = 0,
    workers: int = 1,
    *,
    modules: list[str] | None = None,
    checks: dict[str, list[tuple[str, Check]]] | None = None,
) -> SelftestReport:
    """Run the registered checks; a raising check is a failed check."""
    registry = CHECKS if checks is None else checks
    selected = list(registry) if modules is None else modules
    verdicts: list[CheckVerdict] = []
    for module in selected:
        for name, check in registry[module]:
            try:
                detail = check(seed, workers)
                verdicts.append(CheckVerdict(module=module, name=name, passed=True, detail=detail))
            except Exception as exc:
                logger.error(f"selftest {module}.{name} failed: {exc}")
                verdicts.append(
                    CheckVerdict(
                        module=module,
                        name=name,
                        passed=False,
                        detail=f"{type(exc).__name__}: {exc}",
                    )
                )
    summary = {
        module: all(v.passed for v in verdicts if v.module == module) for module in selected
    }
    return SelftestReport(
        seed=seed,
        workers=workers,
        modules=summary,
        checks=verdicts,
        passed=all(summary.values()),
    )
