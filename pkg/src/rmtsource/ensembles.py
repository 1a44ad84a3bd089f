"""Eigenvalue samplers for Gaussian and chiral ensembles with a source.

The batched ``draw_*`` functions take a ``numpy.random.Generator`` and a
batch size and return an array of sorted eigenvalues, one row per sample;
they are what the Monte Carlo engine calls. The ``sample_*`` functions wrap
one draw into an ``EigenSample``.

Conventions:
    * GOE: H = (A + Aᵀ)/2 + diag(s), A standard normal. Diagonal variance 1,
      off-diagonal variance 1/2.
    * GUE: X = (A + iB)/√2, H = (X + X†)/2 + diag(s). Off-diagonal real and
      imaginary parts have variance 1/4 each, the diagonal variance 1/2.
    * Recursive β-ensemble: weight e^{-Σλ²/2} with source μ, built one
      bordered matrix at a time from the secular equation
          λ - x11 - Σ_j q_j/(λ - λ_j) = 0,  x11 ~ N[μ_k, 1], q_j ~ Γ[β/2, 1].
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, TextIO, Union

import numpy as np

from rmtsource.exceptions import (
    BracketFailureError,
    EigenResidualError,
    InterlacingError,
    InvalidParameterError,
    TraceIdentityError,
)
from rmtsource.logging import get_logger
from rmtsource.models import ChiralSourceSpec, EigenSample, schema_id

logger = get_logger("ensembles")

RngLike = Union[np.random.Generator, int, None]
Draw = Callable[[np.random.Generator, int], np.ndarray]

EIGEN_RESIDUAL_TOL = 1e-10
ROOT_TOL = 1e-12
TRACE_TOL = 1e-9
DEGENERATE_GAP = 1e-12
BISECTION_MAX_ITER = 80
NEWTON_MAX_ITER = 100


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _seed_of(rng: RngLike) -> int | None:
    return int(rng) if isinstance(rng, (int, np.integer)) else None


def _source_vector(values: Sequence[float], n: int, name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float).reshape(-1)
    if vector.shape[0] != n:
        raise InvalidParameterError(f"{name} must have length {n}, got {vector.shape[0]}")
    if not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"{name} entries must be finite")
    return vector


# ---------------------------------------------------------------------------
# Dense ensembles
# ---------------------------------------------------------------------------


def checked_eigvalsh(matrices: np.ndarray) -> np.ndarray:
    """Eigenvalues of a batch of Hermitian matrices, residual-checked.

    Raises EigenResidualError when ‖Hv - vλ‖ exceeds 1e-10‖H‖ for any
    matrix in the batch.
    """
    values, vectors = np.linalg.eigh(matrices)
    residual = np.linalg.norm(matrices @ vectors - vectors * values[..., None, :], axis=(-2, -1))
    norm = np.linalg.norm(matrices, axis=(-2, -1))
    ratio = residual / np.maximum(norm, np.finfo(float).tiny)
    worst = float(np.max(ratio)) if ratio.size else 0.0
    if worst > EIGEN_RESIDUAL_TOL:
        raise EigenResidualError(worst)
    return values


def draw_shifted_goe(rng: np.random.Generator, s: Sequence[float], size: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    a = rng.standard_normal((size, n, n))
    h = 0.5 * (a + np.swapaxes(a, -1, -2))
    h[:, np.arange(n), np.arange(n)] += s
    return checked_eigvalsh(h)


def draw_shifted_gue(rng: np.random.Generator, s: Sequence[float], size: int) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    x = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2.0)
    h = 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))
    h[:, np.arange(n), np.arange(n)] += s
    return checked_eigvalsh(h)


def draw_wishart_source(
    rng: np.random.Generator, spec: ChiralSourceSpec, size: int
) -> np.ndarray:
    """Eigenvalues of (X + X0)†(X + X0); X is n×p, X0 has √mu on its diagonal."""
    n, p, variance = spec.n, spec.p, spec.entry_variance
    if spec.field == "real":
        x = rng.standard_normal((size, n, p)) * math.sqrt(variance)
    else:
        x = (rng.standard_normal((size, n, p)) + 1j * rng.standard_normal((size, n, p))) * math.sqrt(
            variance / 2.0
        )
    x[:, np.arange(p), np.arange(p)] += np.sqrt(np.asarray(spec.mu, dtype=float))
    w = np.conj(np.swapaxes(x, -1, -2)) @ x
    return checked_eigvalsh(w)


# ---------------------------------------------------------------------------
# Secular equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecursionStep:
    """One bordering step: poles λ^{(k)}, weights q and the new diagonal entry."""

    poles: np.ndarray
    weights: np.ndarray
    shift: float


def _secular(x: np.ndarray, poles: np.ndarray, weights: np.ndarray, shift: np.ndarray):
    diff = x[..., None] - poles[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / diff
        value = x - shift[:, None] - np.sum(weights[:, None, :] * inv, axis=-1)
        slope = 1.0 + np.sum(weights[:, None, :] * inv * inv, axis=-1)
    return value, slope


def secular_roots_batch(
    poles: np.ndarray,
    weights: np.ndarray,
    shift: np.ndarray,
    *,
    step: int = 0,
) -> np.ndarray:
    """Roots of λ - x11 - Σ q_j/(λ - λ_j) = 0 for a batch of bordering steps.

    Args:
        poles: (B, k) sorted poles.
        weights: (B, k) positive weights.
        shift: (B,) new diagonal entries x11.
        step: Recursion step reported in interlacing/trace errors.

    Returns:
        (B, k+1) sorted roots. Each gap between poles holds one root, and one
        lies on each flank inside the Weyl bound.
    """
    poles = np.atleast_2d(np.asarray(poles, dtype=float))
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    _, k = poles.shape
    if k == 0:
        return shift[:, None].copy()

    norm_b = np.sqrt(np.sum(weights, axis=1))
    lower_flank = np.minimum(shift, poles[:, 0]) - norm_b - 1.0
    upper_flank = np.maximum(shift, poles[:, -1]) + norm_b + 1.0
    lo = np.concatenate([lower_flank[:, None], poles], axis=1)
    hi = np.concatenate([poles, upper_flank[:, None]], axis=1)
    lo0, hi0 = lo.copy(), hi.copy()
    width0 = hi - lo
    scale = 1.0 + np.maximum(np.max(np.abs(poles), axis=1), np.abs(shift))
    degenerate = width0 <= DEGENERATE_GAP * scale[:, None]

    for _ in range(BISECTION_MAX_ITER):
        active = (hi - lo) > 1e-3 * width0
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        value, _ = _secular(mid, poles, weights, shift)
        lo = np.where(active & (value < 0), mid, lo)
        hi = np.where(active & (value >= 0), mid, hi)

    x = 0.5 * (lo + hi)
    for _ in range(NEWTON_MAX_ITER):
        value, slope = _secular(x, poles, weights, shift)
        lo = np.where(value < 0, x, lo)
        hi = np.where(value > 0, x, hi)
        candidate = x - value / slope
        inside = (candidate > lo) & (candidate < hi)
        candidate = np.where(inside, candidate, 0.5 * (lo + hi))
        tol = ROOT_TOL * (1.0 + np.abs(x))
        done = (np.abs(candidate - x) <= tol) | (hi - lo <= tol) | (value == 0) | degenerate
        x = candidate
        if done.all():
            break
    else:
        logger.debug(f"secular solver hit {NEWTON_MAX_ITER} iterations at step {step}")

    # Coincident poles: the merged-weight root sits on the pole itself.
    roots = np.where(degenerate, lo0, x)

    if not np.all(np.isfinite(roots)) or np.any(roots < lo0) or np.any(roots > hi0):
        raise BracketFailureError(f"secular root left its bracket at step {step}")
    if np.any(roots[:, :-1] > poles) or np.any(poles > roots[:, 1:]):
        raise InterlacingError(step)

    defect = np.abs(np.sum(roots, axis=1) - np.sum(poles, axis=1) - shift)
    bound = TRACE_TOL * (k + 1) * (1.0 + np.max(np.abs(roots), axis=1))
    if np.any(defect > bound):
        raise TraceIdentityError(step, float(np.max(defect)))
    return roots


def secular_roots(step: RecursionStep) -> np.ndarray:
    """Sorted roots (length k+1) of one bordering step."""
    poles = np.asarray(step.poles, dtype=float).reshape(-1)
    weights = np.asarray(step.weights, dtype=float).reshape(-1)
    if poles.shape != weights.shape:
        raise InvalidParameterError("poles and weights must have equal length")
    if np.any(np.diff(poles) < 0):
        raise InvalidParameterError("poles must be sorted ascending")
    if np.any(weights <= 0):
        raise InvalidParameterError("weights must be positive")
    roots = secular_roots_batch(poles[None, :], weights[None, :], np.array([step.shift]))
    return roots[0]


# ---------------------------------------------------------------------------
# Recursive β-ensemble
# ---------------------------------------------------------------------------


def draw_beta_gaussian_source(
    rng: np.random.Generator, beta: float, mu: Sequence[float], size: int
) -> np.ndarray:
    """Recursive construction; rows distributed per ∏|Δ|^β e^{-Σλ²/2} ₀F₀^{(2/β)}(λ; μ)."""
    if not beta > 0:
        raise InvalidParameterError(f"beta must be > 0, got {beta}")
    mu = np.asarray(mu, dtype=float)
    lam = (mu[0] + rng.standard_normal(size))[:, None]
    for k in range(1, mu.shape[0]):
        shift = mu[k] + rng.standard_normal(size)
        weights = rng.gamma(beta / 2.0, 1.0, size=(size, k))
        lam = secular_roots_batch(lam, weights, shift, step=k + 1)
    return lam


def draw_me_weight(
    rng: np.random.Generator, beta: float, c: float, x: Sequence[float], size: int
) -> np.ndarray:
    """Rows distributed per ∏|Δ|^β e^{-cΣy²} ₀F₀^{(2/β)}(y; 2c·x)."""
    if not c > 0:
        raise InvalidParameterError(f"weight constant c must be > 0, got {c}")
    factor = math.sqrt(2.0 * c)
    mu = factor * np.asarray(x, dtype=float)
    return draw_beta_gaussian_source(rng, beta, mu, size) / factor


# ---------------------------------------------------------------------------
# Single-sample wrappers
# ---------------------------------------------------------------------------


def _sample(values: np.ndarray, rng: RngLike, ensemble: str, steps: int = 0) -> EigenSample:
    return EigenSample(values=values[0].tolist(), seed=_seed_of(rng), ensemble=ensemble, steps=steps)


def sample_shifted_goe(n: int, s: Sequence[float], rng: RngLike) -> EigenSample:
    s = _source_vector(s, n, "s")
    return _sample(draw_shifted_goe(as_generator(rng), s, 1), rng, "goe")


def sample_shifted_gue(n: int, s: Sequence[float], rng: RngLike) -> EigenSample:
    s = _source_vector(s, n, "s")
    return _sample(draw_shifted_gue(as_generator(rng), s, 1), rng, "gue")


def sample_wishart_source(spec: ChiralSourceSpec, rng: RngLike) -> EigenSample:
    return _sample(draw_wishart_source(as_generator(rng), spec, 1), rng, f"wishart-{spec.field}")


def sample_beta_gaussian_source(
    n: int, beta: float, mu: Sequence[float], rng: RngLike
) -> EigenSample:
    mu = _source_vector(mu, n, "mu")
    values = draw_beta_gaussian_source(as_generator(rng), beta, mu, 1)
    return _sample(values, rng, "beta-gaussian", steps=n)


def sample_me_weight(
    n: int, beta: float, c: float, x: Sequence[float], rng: RngLike
) -> EigenSample:
    x = _source_vector(x, n, "x")
    values = draw_me_weight(as_generator(rng), beta, c, x, 1)
    return _sample(values, rng, "me-weight", steps=n)


# ---------------------------------------------------------------------------
# Sampler registry and CSV dumps
# ---------------------------------------------------------------------------


def make_draw(
    ensemble: str,
    *,
    beta: float = 1.0,
    source: Sequence[float] = (),
    c: float = 0.5,
    chiral: ChiralSourceSpec | None = None,
) -> Draw:
    """Bind an ensemble name and its parameters into a ``(rng, size)`` draw."""
    source = np.asarray(source, dtype=float)
    if ensemble == "goe":
        return lambda rng, size: draw_shifted_goe(rng, source, size)
    if ensemble == "gue":
        return lambda rng, size: draw_shifted_gue(rng, source, size)
    if ensemble == "beta":
        return lambda rng, size: draw_beta_gaussian_source(rng, beta, source, size)
    if ensemble == "me":
        return lambda rng, size: draw_me_weight(rng, beta, c, source, size)
    if ensemble == "wishart":
        if chiral is None:
            raise InvalidParameterError("wishart sampling needs a ChiralSourceSpec")
        return lambda rng, size: draw_wishart_source(rng, chiral, size)
    raise InvalidParameterError(f"unknown ensemble {ensemble!r}")


def _format_float(value: float) -> str:
    return format(float(value), ".17g")


def write_samples_csv(
    target: Union[str, Path, TextIO],
    ensemble: str,
    beta: float,
    n: int,
    seed: int,
    samples: np.ndarray,
) -> None:
    """Header ``# ensemble,beta,N,seed`` then one sorted eigenvalue tuple per row."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as handle:
            write_samples_csv(handle, ensemble, beta, n, seed, samples)
        return
    target.write(f"# schema: {schema_id('samples')}\n")
    target.write("# ensemble,beta,N,seed\n")
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow([ensemble, _format_float(beta), n, seed])
    for row in np.atleast_2d(samples):
        writer.writerow([_format_float(v) for v in row])


def samples_csv_text(ensemble: str, beta: float, n: int, seed: int, samples: np.ndarray) -> str:
    buffer = io.StringIO()
    write_samples_csv(buffer, ensemble, beta, n, seed, samples)
    return buffer.getvalue()
