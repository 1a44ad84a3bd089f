"""Monte Carlo engine: seeded worker streams, product statistics, merging.

Worker w of stream k draws from ``default_rng(SeedSequence(seed,
spawn_key=(k, w)))``; stream 0 is the left-hand side of a comparison and
stream 1 the right-hand side. Shards run as ``asyncio.to_thread`` tasks
bounded by a semaphore and are merged in worker order, so a fixed
(seed, workers, chunk_size) reproduces the estimate bit for bit.
"""

from __future__ import annotations

import asyncio
import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from rmtsource.exceptions import InvalidParameterError
from rmtsource.logging import get_logger, shard_timer
from rmtsource.models import MCEstimate

logger = get_logger("montecarlo")

Draw = Callable[[np.random.Generator, int], np.ndarray]

LHS_STREAM = 0
RHS_STREAM = 1
DEFAULT_CHUNK_SIZE = 4096
# Per-sample log-modulus above which sums of products are no longer safe.
OVERFLOW_LOG = 700.0


def worker_generators(seed: int, stream: int, workers: int) -> list[np.random.Generator]:
    """Independent generators for (seed, stream, worker index)."""
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    return [
        np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, w)))
        for w in range(workers)
    ]


def shard_sizes(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


@dataclass(frozen=True)
class LinearFactorProduct:
    """prefactor · ∏_j ∏_k (points_j + scale · y_k)^power for each sample row y."""

    points: Sequence[complex]
    scale: complex = -1.0
    power: int = 1
    prefactor: complex = 1.0

    def is_real(self, samples: np.ndarray) -> bool:
        """True when every factor and the prefactor are real for these samples."""
        constants = np.asarray([*self.points, self.scale, self.prefactor], dtype=complex)
        return not np.iscomplexobj(samples) and not np.any(constants.imag)

    def log_terms(self, samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Log-modulus and phase of the statistic, one entry per row.

        For a real statistic the phase is exactly 0 or π (the sign parity),
        never a rounded sum of angles.
        """
        samples = np.asarray(samples)
        prefactor = complex(self.prefactor)
        if self.is_real(samples):
            points = np.asarray(self.points, dtype=complex).real
            factors = points[None, :, None] + float(np.real(self.scale)) * samples[:, None, :]
            negatives = self.power * np.count_nonzero(factors < 0, axis=(1, 2))
            if prefactor.real < 0:
                negatives = negatives + 1
            phase = np.where(negatives % 2 == 1, np.pi, 0.0)
        else:
            points = np.asarray(self.points, dtype=complex)
            factors = points[None, :, None] + self.scale * samples[:, None, :]
            phase = self.power * np.sum(np.angle(factors), axis=(1, 2)) + np.angle(prefactor)
        with np.errstate(divide="ignore"):
            log_abs = self.power * np.sum(np.log(np.abs(factors)), axis=(1, 2))
        if prefactor == 0:
            return np.full(log_abs.shape, -np.inf), phase
        return log_abs + math.log(abs(prefactor)), phase

    def __call__(self, samples: np.ndarray) -> np.ndarray:
        log_abs, phase = self.log_terms(samples)
        if np.all((phase == 0.0) | (phase == np.pi)):
            return np.where(phase == 0.0, 1.0, -1.0) * np.exp(log_abs) + 0j
        return np.exp(log_abs + 1j * phase)


@dataclass
class ProductAccumulator:
    """Running mean and centred second moments of a complex statistic.

    ``merge`` combines two partial accumulators (pairwise update of mean and
    M2), so shards can be reduced in any grouping with the same result up to
    rounding; the engine always reduces in worker order.
    """

    count: int = 0
    mean: complex = 0j
    m2_re: float = 0.0
    m2_im: float = 0.0
    log_abs_sum: float = 0.0
    overflow: bool = False

    def add(self, log_abs: np.ndarray, phase: np.ndarray) -> None:
        n = int(log_abs.shape[0])
        if n == 0:
            return
        finite_logs = np.where(np.isfinite(log_abs), log_abs, 0.0)
        other = ProductAccumulator(count=n, log_abs_sum=float(np.sum(finite_logs)))
        if self.overflow or np.any(log_abs > OVERFLOW_LOG):
            other.overflow = True
        else:
            if np.all((phase == 0.0) | (phase == np.pi)):
                # Real statistic: exact signs, no roundoff imaginary part.
                values = np.where(phase == 0.0, 1.0, -1.0) * np.exp(log_abs) + 0j
            else:
                values = np.exp(log_abs + 1j * phase)
            other.mean = complex(np.mean(values))
            other.m2_re = float(np.sum((values.real - other.mean.real) ** 2))
            other.m2_im = float(np.sum((values.imag - other.mean.imag) ** 2))
        merged = self.merge(other)
        self.__dict__.update(merged.__dict__)

    def merge(self, other: ProductAccumulator) -> ProductAccumulator:
        count = self.count + other.count
        if count == 0:
            return ProductAccumulator()
        overflow = self.overflow or other.overflow
        log_abs_sum = self.log_abs_sum + other.log_abs_sum
        if overflow:
            return ProductAccumulator(count=count, log_abs_sum=log_abs_sum, overflow=True)
        delta = other.mean - self.mean
        weight = self.count * other.count / count
        return ProductAccumulator(
            count=count,
            mean=self.mean + delta * other.count / count,
            m2_re=self.m2_re + other.m2_re + delta.real**2 * weight,
            m2_im=self.m2_im + other.m2_im + delta.imag**2 * weight,
            log_abs_sum=log_abs_sum,
        )

    def estimate(self) -> MCEstimate:
        n = self.count
        if n < 2:
            raise InvalidParameterError(f"need at least 2 samples, got {n}")
        if self.overflow:
            return MCEstimate(
                re=None,
                im=None,
                se=0.0,
                n_samples=n,
                overflow=True,
                log_abs_mean=self.log_abs_sum / n,
            )
        se_re = math.sqrt(self.m2_re / (n - 1) / n)
        se_im = math.sqrt(self.m2_im / (n - 1) / n)
        return MCEstimate(
            re=self.mean.real,
            im=self.mean.imag,
            se=math.hypot(se_re, se_im),
            se_re=se_re,
            se_im=se_im,
            n_samples=n,
        )


def accumulate(samples: np.ndarray, statistic: LinearFactorProduct) -> ProductAccumulator:
    acc = ProductAccumulator()
    acc.add(*statistic.log_terms(samples))
    return acc


def _run_shard(
    draw: Draw,
    statistic: LinearFactorProduct,
    rng: np.random.Generator,
    size: int,
    chunk_size: int,
    label: str,
) -> ProductAccumulator:
    acc = ProductAccumulator()
    remaining = size
    with shard_timer(logger, label, size):
        while remaining > 0:
            batch = min(chunk_size, remaining)
            acc.add(*statistic.log_terms(draw(rng, batch)))
            remaining -= batch
    return acc


async def estimate_async(
    draw: Draw,
    statistic: LinearFactorProduct,
    n_samples: int,
    seed: int,
    *,
    stream: int = LHS_STREAM,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Monte Carlo mean of ``statistic`` over ``n_samples`` draws."""
    if n_samples < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {n_samples}")
    if chunk_size < 1:
        raise InvalidParameterError(f"chunk_size must be >= 1, got {chunk_size}")
    generators = worker_generators(seed, stream, workers)
    sizes = shard_sizes(n_samples, workers)
    semaphore = asyncio.Semaphore(workers)

    async def run(w: int) -> ProductAccumulator:
        async with semaphore:
            return await asyncio.to_thread(
                _run_shard, draw, statistic, generators[w], sizes[w], chunk_size, f"stream {stream} worker {w}"
            )

    shards = await asyncio.gather(*(run(w) for w in range(workers)))
    return reduce(ProductAccumulator.merge, shards, ProductAccumulator()).estimate()


def estimate(
    draw: Draw,
    statistic: LinearFactorProduct,
    n_samples: int,
    seed: int,
    *,
    stream: int = LHS_STREAM,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> MCEstimate:
    """Blocking form of ``estimate_async``; not for use inside a running loop."""
    return asyncio.run(
        estimate_async(
            draw,
            statistic,
            n_samples,
            seed,
            stream=stream,
            workers=workers,
            chunk_size=chunk_size,
        )
    )


def z_score(lhs: MCEstimate, rhs: MCEstimate) -> tuple[float, float]:
    """Componentwise z-scores (real, imaginary) of lhs - rhs.

    A component with zero combined error scores its absolute difference.
    """
    if lhs.overflow or rhs.overflow:
        return math.inf, math.inf
    diff = lhs.mean - rhs.mean
    se_re = math.hypot(lhs.se_re, rhs.se_re)
    se_im = math.hypot(lhs.se_im, rhs.se_im)
    z_re = abs(diff.real) / se_re if se_re > 0 else abs(diff.real)
    z_im = abs(diff.imag) / se_im if se_im > 0 else abs(diff.imag)
    return z_re, z_im
