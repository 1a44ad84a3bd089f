"""Truncated Jack-polynomial engine.

Jack polynomials are built in the monomial basis from the branching rule
    P_κ(x_1..x_N) = Σ_μ ψ_{κ/μ} x_N^{|κ|-|μ|} P_μ(x_1..x_{N-1}),
the sum running over horizontal strips κ/μ. The resulting exponent table and
coefficients are cached per (κ, N) on a ``JackContext`` and evaluated over a
batch of points at once, which is what the density grid needs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from rmtsource.exceptions import InvalidParameterError, JackDegreeError, PochhammerPoleError
from rmtsource.logging import get_logger

logger = get_logger("jack")

DEFAULT_DEGREE = 20
DEFAULT_MAX_DEGREE = 40
DEFAULT_TOLERANCE = 1e-10
DENSITY_MAX_N = 3


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing tuple of positive parts."""

    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise InvalidParameterError(f"partition parts must be positive: {parts}")
        if any(b > a for a, b in zip(parts, parts[1:])):
            raise InvalidParameterError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> Partition:
        """Build from any ordering, dropping zero parts."""
        return cls(tuple(sorted((p for p in parts if p), reverse=True)))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i] if i < len(self.parts) else 0

    def conjugate(self) -> Partition:
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def cells(self) -> Iterator[tuple[int, int]]:
        """Cells (row, column), both zero-based."""
        for i, part in enumerate(self.parts):
            for j in range(part):
                yield i, j

    def arm(self, i: int, j: int) -> int:
        return self.parts[i] - j - 1

    def leg(self, i: int, j: int) -> int:
        return self.conjugate()[j] - i - 1

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


def partitions(k: int, max_length: int | None = None, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of k in reverse lexicographic order."""
    if k < 0:
        return
    if k == 0:
        yield Partition(())
        return
    if max_length == 0:
        return
    top = k if max_part is None else min(k, max_part)
    rest_length = None if max_length is None else max_length - 1
    for first in range(top, 0, -1):
        for rest in partitions(k - first, rest_length, first):
            yield Partition((first,) + rest.parts)


def partitions_up_to(degree: int, max_length: int | None = None) -> Iterator[Partition]:
    for k in range(degree + 1):
        yield from partitions(k, max_length)


# ---------------------------------------------------------------------------
# Closed-form factors
# ---------------------------------------------------------------------------


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0:
        raise InvalidParameterError(f"alpha must be > 0, got {alpha}")
    return alpha


def dprime(kappa: Partition, alpha: float) -> float:
    """Upper hook product d'_κ = ∏_s (α(a(s)+1) + l(s))."""
    alpha = _check_alpha(alpha)
    conj = kappa.conjugate()
    result = 1.0
    for i, j in kappa.cells():
        result *= alpha * (kappa[i] - j) + (conj[j] - i - 1)
    return result


def jack_value_at_ones(kappa: Partition, n: int, alpha: float) -> float:
    """P_κ(1^N; α) = ∏_s (N - l'(s) + α a'(s)) / (α a(s) + l(s) + 1)."""
    alpha = _check_alpha(alpha)
    conj = kappa.conjugate()
    result = 1.0
    for i, j in kappa.cells():
        arm = kappa[i] - j - 1
        leg = conj[j] - i - 1
        result *= (n - i + alpha * j) / (alpha * arm + leg + 1)
    return result


def gen_pochhammer(c: float, kappa: Partition, alpha: float) -> float:
    """[c]_κ = ∏_j Γ(c - (j-1)/α + κ_j) / Γ(c - (j-1)/α), as rising factorials."""
    alpha = _check_alpha(alpha)
    result = 1.0
    for row, part in enumerate(kappa.parts, start=1):
        base = c - (row - 1) / alpha
        for i in range(part):
            factor = base + i
            if abs(factor) <= 1e-13 * max(1.0, abs(base)):
                raise PochhammerPoleError(c, row)
            result *= factor
    return result


def _b_factor(kappa: Partition, conj: Partition, i: int, j: int, alpha: float) -> float:
    arm = kappa[i] - j - 1
    leg = conj[j] - i - 1
    return (alpha * arm + leg + 1) / (alpha * (arm + 1) + leg)


def _horizontal_strips(kappa: Partition) -> Iterator[Partition]:
    """All μ ⊆ κ with κ/μ a horizontal strip (κ_{i+1} <= μ_i <= κ_i)."""
    ranges = [range(kappa[i + 1], kappa[i] + 1) for i in range(len(kappa))]
    for parts in itertools.product(*ranges):
        yield Partition.of(*parts)


def _psi(kappa: Partition, mu: Partition, alpha: float) -> float:
    rows = {i for i in range(len(kappa)) if mu[i] < kappa[i]}
    cols = {j for i in rows for j in range(mu[i], kappa[i])}
    kconj, mconj = kappa.conjugate(), mu.conjugate()
    result = 1.0
    for i, j in mu.cells():
        if i in rows and j not in cols:
            result *= _b_factor(mu, mconj, i, j, alpha) / _b_factor(kappa, kconj, i, j, alpha)
    return result


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class JackContext:
    """Jack parameter plus a per-(κ, N) cache of monomial expansions.

    The cache is filled idempotently; concurrent readers may at worst
    recompute an entry.
    """

    def __init__(self, alpha: float, max_degree: int = DEFAULT_MAX_DEGREE) -> None:
        self.alpha = _check_alpha(alpha)
        self.max_degree = max_degree
        self._terms: dict[tuple[tuple[int, ...], int], dict[tuple[int, ...], float]] = {}
        self._tables: dict[tuple[tuple[int, ...], int], tuple[np.ndarray, np.ndarray]] = {}

    def _expand(self, kappa: Partition, n: int) -> dict[tuple[int, ...], float]:
        key = (kappa.parts, n)
        cached = self._terms.get(key)
        if cached is not None:
            return cached
        if len(kappa) > n:
            terms: dict[tuple[int, ...], float] = {}
        elif n == 0:
            terms = {(): 1.0}
        else:
            terms = {}
            for mu in _horizontal_strips(kappa):
                if len(mu) > n - 1:
                    continue
                psi = _psi(kappa, mu, self.alpha)
                last = kappa.weight - mu.weight
                for exponents, coef in self._expand(mu, n - 1).items():
                    monomial = exponents + (last,)
                    terms[monomial] = terms.get(monomial, 0.0) + psi * coef
        self._terms[key] = terms
        return terms

    def jack_coefficients(self, kappa: Partition, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix (terms × N) and coefficients of P_κ in N variables."""
        if kappa.weight > self.max_degree:
            raise JackDegreeError(kappa.weight, self.max_degree)
        key = (kappa.parts, n)
        table = self._tables.get(key)
        if table is None:
            terms = self._expand(kappa, n)
            exponents = np.array(list(terms.keys()), dtype=np.int64).reshape(len(terms), n)
            coefficients = np.array(list(terms.values()), dtype=float)
            table = (exponents, coefficients)
            self._tables[key] = table
        return table

    def evaluate(self, kappa: Partition, x: np.ndarray) -> np.ndarray:
        """P_κ over the last axis of x (leading axes are a batch)."""
        x = np.asarray(x)
        n = x.shape[-1]
        if len(kappa) > n:
            raise InvalidParameterError(
                f"partition {kappa} has more than {n} parts"
            )
        exponents, coefficients = self.jack_coefficients(kappa, n)
        if exponents.shape[0] == 0:
            return np.zeros(x.shape[:-1], dtype=x.dtype)
        monomials = np.prod(x[..., None, :] ** exponents, axis=-1)
        return monomials @ coefficients


def jack_poly(
    kappa: Partition,
    x: Sequence[complex] | np.ndarray,
    alpha: float,
    *,
    context: JackContext | None = None,
) -> complex | np.ndarray:
    """P-normalised Jack polynomial P_κ(x; α) (leading monomial coefficient 1)."""
    ctx = context if context is not None and context.alpha == alpha else JackContext(alpha)
    value = ctx.evaluate(kappa, np.asarray(x))
    return value[()] if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class SeriesResult:
    """Truncated hypergeometric series value with its tail estimate."""

    value: complex | np.ndarray
    tail: float
    converged: bool
    degree: int


def _tail_estimate(shells: list[float]) -> float:
    last = shells[-1]
    if last == 0.0:
        return 0.0
    prev = shells[-2] if len(shells) > 1 else 0.0
    if prev == 0.0:
        return math.inf
    ratio = last / prev
    if ratio >= 1.0:
        return math.inf
    return last * ratio / (1.0 - ratio)


def _hyper_series(
    c: float | None,
    x: np.ndarray,
    y: np.ndarray,
    alpha: float,
    degree: int,
    tolerance: float,
    context: JackContext | None,
    label: str,
) -> SeriesResult:
    alpha = _check_alpha(alpha)
    x = np.asarray(x)
    y = np.asarray(y)
    if y.ndim != 1 or x.shape[-1] != y.shape[0]:
        raise InvalidParameterError(
            f"x and y must share their variable count, got {x.shape} and {y.shape}"
        )
    if degree < 0:
        raise InvalidParameterError(f"truncation degree must be >= 0, got {degree}")
    ctx = context if context is not None and context.alpha == alpha else JackContext(alpha)
    if degree > ctx.max_degree:
        raise JackDegreeError(degree, ctx.max_degree)

    n = y.shape[0]
    dtype = np.result_type(x.dtype, y.dtype, float)
    total = np.zeros(x.shape[:-1], dtype=dtype)
    shells: list[float] = []
    for k in range(degree + 1):
        shell = np.zeros(x.shape[:-1], dtype=dtype)
        for kappa in partitions(k, n):
            py = ctx.evaluate(kappa, y)
            if py == 0:
                continue
            denominator = dprime(kappa, alpha) * jack_value_at_ones(kappa, n, alpha)
            if c is not None:
                denominator *= gen_pochhammer(c, kappa, alpha)
            shell = shell + (alpha**k * py / denominator) * ctx.evaluate(kappa, x)
        total = total + shell
        shells.append(float(np.max(np.abs(shell))) if shell.size else 0.0)

    tail = _tail_estimate(shells)
    scale = max(1.0, float(np.max(np.abs(total))) if total.size else 1.0)
    converged = tail <= tolerance * scale
    if not converged:
        logger.warning(
            f"{label} truncated at degree {degree} with tail estimate {tail:.3e}"
        )
    value = total[()] if total.ndim == 0 else total
    return SeriesResult(value=value, tail=tail, converged=converged, degree=degree)


def hyper_0f0(
    x: Sequence[complex] | np.ndarray,
    y: Sequence[complex] | np.ndarray,
    alpha: float,
    degree: int = DEFAULT_DEGREE,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    context: JackContext | None = None,
) -> SeriesResult:
    """₀F₀^{(α)}(x; y) = Σ_{|κ|<=K} α^{|κ|} P_κ(x) P_κ(y) / (d'_κ P_κ(1^N))."""
    return _hyper_series(None, x, y, alpha, degree, tolerance, context, "0F0 series")


def hyper_0f1(
    c: float,
    x: Sequence[complex] | np.ndarray,
    y: Sequence[complex] | np.ndarray,
    alpha: float,
    degree: int = DEFAULT_DEGREE,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    context: JackContext | None = None,
) -> SeriesResult:
    """₀F₁^{(α)}(c; x; y): the ₀F₀ series with the extra divisor [c]_κ."""
    return _hyper_series(float(c), x, y, alpha, degree, tolerance, context, "0F1 series")


def gaussian_source_density(
    lam: Sequence[float] | np.ndarray,
    mu: Sequence[float],
    beta: float,
    degree: int = DEFAULT_DEGREE,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    context: JackContext | None = None,
) -> float | np.ndarray:
    """Unnormalised eigenvalue density of the Gaussian β-ensemble with source.

    ∏_{j<k}|λ_k-λ_j|^β e^{-Σλ²/2-Σμ²/2} ₀F₀^{(2/β)}(λ; μ); λ may carry
    leading batch axes.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    n = mu.shape[0]
    if lam.shape[-1] != n:
        raise InvalidParameterError(f"lambda and mu lengths differ: {lam.shape[-1]} vs {n}")
    if n > DENSITY_MAX_N:
        raise InvalidParameterError(f"density evaluator is limited to N <= {DENSITY_MAX_N}")
    if not beta > 0:
        raise InvalidParameterError(f"beta must be > 0, got {beta}")

    vandermonde = np.ones(lam.shape[:-1])
    for j in range(n):
        for k in range(j + 1, n):
            vandermonde = vandermonde * np.abs(lam[..., k] - lam[..., j]) ** beta
    gauss = np.exp(-0.5 * np.sum(lam**2, axis=-1) - 0.5 * np.sum(mu**2))
    series = hyper_0f0(lam, mu, 2.0 / beta, degree, tolerance=tolerance, context=context)
    value = vandermonde * gauss * np.real(series.value)
    return float(value) if np.ndim(value) == 0 else value
