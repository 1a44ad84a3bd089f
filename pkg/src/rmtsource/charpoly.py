"""Averaged characteristic polynomials with a source.

Gaussian side: ⟨det(λ - H - diag(s))⟩ for GOE/GUE with off-diagonal
variance 1/2 is the average of ∏_j (λ - s_j + iξ) over a single
ξ ~ N[0, 1/2], whatever β is. Chiral side: for X n×p with unit-variance
entries and a diagonal source, ⟨det(λ - (X+X0)†(X+X0))⟩ is a multiple
Laguerre polynomial of type II, available both as a finite Laguerre sum
and as a Gauss-Laguerre integral against ₀F₁.
"""

from __future__ import annotations

import math
from typing import Sequence, Union

import numpy as np
from scipy import special

from rmtsource.exceptions import ImaginaryResidueError, InvalidParameterError, NonConvergenceError
from rmtsource.logging import get_logger
from rmtsource.models import EigenSample, MCEstimate
from rmtsource.montecarlo import LinearFactorProduct, accumulate
from rmtsource.specfun import (
    ScaledValue,
    hyp0f1_values,
    incomplete_hermite,
    laguerre_table,
    quadrature_rule,
    scaled_sum,
)

logger = get_logger("charpoly")

COMBINATORIAL_MAX_N = 30
IMAGINARY_RESIDUE_TOL = 1e-12
DEFAULT_HERMITE_EXTRA = 8
DEFAULT_LAGUERRE_EXTRA = 40
# Node-doubling agreement required of the Gauss-Laguerre routes.
DOUBLING_TOL = 1e-8

Samples = Union[Sequence[EigenSample], np.ndarray]


def elementary_symmetric(values: Sequence[float]) -> np.ndarray:
    """e_0, ..., e_k of the given values by the coefficient recursion."""
    e = np.zeros(len(values) + 1)
    e[0] = 1.0
    for count, v in enumerate(values, start=1):
        e[1 : count + 1] = e[1 : count + 1] + v * e[:count]
    return e


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"{name} entries must be finite")
    return vector


# ---------------------------------------------------------------------------
# Gaussian ensembles with a source
# ---------------------------------------------------------------------------


def gauss_avg_quadrature(lam: float, s: Sequence[float], m: int | None = None) -> float:
    """Average of ∏_j (λ - s_j + iξ) over ξ with density e^{-ξ²}/√π.

    Gauss-Hermite with ``m`` nodes (default N+8) is exact once
    2m - 1 >= N. The imaginary part must cancel to 1e-12 of the summed
    magnitude and is then dropped.
    """
    s = _as_vector(s, "s")
    n = s.shape[0]
    nodes = n + DEFAULT_HERMITE_EXTRA if m is None else m
    if 2 * nodes - 1 < n:
        raise InvalidParameterError(f"{nodes} nodes cannot integrate degree {n} exactly")
    rule = quadrature_rule("gauss-hermite", nodes)
    factors = (float(lam) - s)[None, :] + 1j * rule.nodes[:, None]
    values = np.prod(factors, axis=1) if n else np.ones(nodes, dtype=complex)
    total = rule.integrate(values) / math.sqrt(math.pi)
    magnitude = float(np.sum(rule.weights * np.abs(values))) / math.sqrt(math.pi)
    if abs(total.imag) > IMAGINARY_RESIDUE_TOL * max(magnitude, 1.0):
        raise ImaginaryResidueError(abs(total.imag))
    return float(total.real)


def gauss_avg_combinatorial(lam: float, s: Sequence[float]) -> float:
    """Σ_j (-1)^j (2j-1)!! 2^{-j} e_{N-2j}(λ - s_1, ..., λ - s_N).

    Fixed points contribute the factors λ - s_l, each 2-cycle -1/2.
    """
    s = _as_vector(s, "s")
    n = s.shape[0]
    if n > COMBINATORIAL_MAX_N:
        raise InvalidParameterError(
            f"combinatorial route limited to N <= {COMBINATORIAL_MAX_N}, got {n}"
        )
    e = elementary_symmetric(float(lam) - s)
    terms = []
    weight = 1.0
    for j in range(n // 2 + 1):
        if j:
            weight *= -(2 * j - 1) / 2.0
        terms.append(weight * e[n - 2 * j])
    return math.fsum(terms)


def incomplete_hermite_form(
    lam: float,
    n: int,
    x: Sequence[float],
    *,
    table_limit: int = 2000,
) -> ScaledValue:
    """(-1)^N (√π/2^N) e^{λ²} Γ^{(r+1)}(λ; {-2x_k}) over the nonzero x_k.

    Equals ``gauss_avg_quadrature(λ, x)`` padded with zeros to length N, but
    stays finite in log space at any N.
    """
    x = _as_vector(x, "x")
    if x.shape[0] > n:
        raise InvalidParameterError(f"at most N={n} source entries, got {x.shape[0]}")
    shifts = [-2.0 * v for v in x if v != 0.0]
    lam = float(lam)
    gamma = incomplete_hermite(n, len(shifts), lam, shifts, table_limit=table_limit)
    value = gamma.scale(lam * lam + 0.5 * math.log(math.pi) - n * math.log(2.0))
    return -value if n % 2 else value


# ---------------------------------------------------------------------------
# Chiral / Wishart ensembles with a source
# ---------------------------------------------------------------------------


def _laguerre_integral(
    lam: float, a: float, m: np.ndarray, nodes: int
) -> tuple[ScaledValue, float]:
    """e^λ/Γ(a+1) ∫ t^a e^{-t} ₀F₁(a+1; -λt) ∏(t + m_l) dt, plus its roundoff scale."""
    rule = quadrature_rule("gauss-laguerre", nodes, a)
    t = rule.nodes
    values = hyp0f1_values(a + 1.0, -lam * t) * np.prod(t[:, None] + m[None, :], axis=1)
    terms = rule.weights * values
    log_prefactor = lam - special.gammaln(a + 1.0)
    integral = math.fsum(terms.tolist())
    roundoff = np.finfo(float).eps * float(np.sum(np.abs(terms))) * len(terms)
    return ScaledValue.from_float(integral).scale(log_prefactor), roundoff * math.exp(
        min(log_prefactor, 700.0)
    )


def box_avg(
    lam: float,
    a: float,
    p: int,
    m: Sequence[float],
    *,
    nodes: int | None = None,
) -> float:
    """(-1)^p e^λ/Γ(a+1) ∫_0^∞ t^a e^{-t} ₀F₁(a+1; -λt) ∏_l (t + m_l) dt.

    Gauss-Laguerre with p+40 nodes by default, checked against a rule with
    twice as many nodes. The integral nearly cancels e^λ for large positive
    λ; use ``box_avg_series`` there.

    Raises:
        NonConvergenceError: the two rules disagree beyond 1e-8 relative and
            beyond their roundoff level.
    """
    if a <= -1:
        raise InvalidParameterError(f"Laguerre parameter must be > -1, got {a}")
    m = _as_vector(m, "m")
    if m.shape[0] != p:
        raise InvalidParameterError(f"m must have length p={p}, got {m.shape[0]}")
    count = p + DEFAULT_LAGUERRE_EXTRA if nodes is None else nodes
    lam = float(lam)

    coarse, coarse_noise = _laguerre_integral(lam, a, m, count)
    fine, fine_noise = _laguerre_integral(lam, a, m, 2 * count)
    coarse_value, fine_value = coarse.to_float(), fine.to_float()
    gap = abs(coarse_value - fine_value)
    allowed = max(DOUBLING_TOL * abs(fine_value), 100.0 * (coarse_noise + fine_noise))
    if gap > allowed:
        logger.warning(f"Gauss-Laguerre routes disagree by {gap:.3e} at lambda={lam}")
        raise NonConvergenceError("Gauss-Laguerre quadrature", 2 * count)
    return -fine_value if p % 2 else fine_value


def box_avg_series_scaled(
    lam: float, a: float, p: int, m: Sequence[float], *, damped: bool = False
) -> ScaledValue:
    """(-1)^p Σ_r e_r(m) (p-r)! L_{p-r}^a(λ) in log space (times e^{-λ/2} if damped)."""
    m = _as_vector(m, "m")
    if m.shape[0] != p:
        raise InvalidParameterError(f"m must have length p={p}, got {m.shape[0]}")
    table = laguerre_table(p, a, lam, damped=damped)
    e = elementary_symmetric(m)
    terms = []
    for r in range(p + 1):
        if e[r] == 0.0:
            continue
        laguerre_value = table[p - r]
        terms.append(
            ScaledValue.from_float(e[r]) * laguerre_value.scale(math.lgamma(p - r + 1))
        )
    total = scaled_sum(terms)
    return -total if p % 2 else total


def box_avg_series(lam: float, a: float, p: int, m: Sequence[float]) -> float:
    """Cancellation-free Laguerre-sum form of ``box_avg``."""
    return box_avg_series_scaled(lam, a, p, m).to_float()


def wishart_avg(lam: float, n: int, p: int, mu: Sequence[float], *, nodes: int | None = None) -> float:
    """⟨det(λ - W)⟩ for W = (X+X0)†(X+X0), X n×p, X0ᵀX0 = diag(μ)."""
    _check_chiral(n, p)
    mu = _as_vector(mu, "mu")
    if np.any(mu < 0):
        raise InvalidParameterError("mu entries must be nonnegative")
    return box_avg(lam, n - p, p, mu, nodes=nodes)


def _check_chiral(n: int, p: int) -> None:
    if p < 0 or n < p:
        raise InvalidParameterError(f"need n >= p >= 0, got n={n}, p={p}")


def chiral_avg_series(lam: float, n: int, p: int, s: Sequence[float]) -> float:
    """(-1)^p λ^{n-p} Σ_r e_r(s²) (p-r)! L_{p-r}^{n-p}(λ²)."""
    _check_chiral(n, p)
    s = _as_vector(s, "s")
    lam = float(lam)
    return lam ** (n - p) * box_avg_series(lam * lam, n - p, p, s**2)


def chiral_avg_integral(
    lam: float, n: int, p: int, s: Sequence[float], *, nodes: int | None = None
) -> float:
    """Integral form of ``chiral_avg_series`` (prefactor e^{λ²} in log space)."""
    _check_chiral(n, p)
    s = _as_vector(s, "s")
    lam = float(lam)
    if p == 0:
        return lam**n
    return lam ** (n - p) * box_avg(lam * lam, n - p, p, s**2, nodes=nodes)


def chiral_charpoly_statistic(lam: complex, n: int, p: int) -> LinearFactorProduct:
    """det(λ - K) = λ^{n-p} ∏_j (λ² - w_j) of the block matrix K = [[0, X], [X†, 0]]."""
    _check_chiral(n, p)
    return LinearFactorProduct(points=[lam * lam], prefactor=lam ** (n - p))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _sample_matrix(samples: Samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        return np.atleast_2d(samples)
    rows = [sample.values for sample in samples]
    if len({len(row) for row in rows}) > 1:
        raise InvalidParameterError("all samples must have the same length")
    return np.asarray(rows, dtype=float)


def mc_product_estimate(samples: Samples, lam: complex) -> MCEstimate:
    """Mean and standard error of ∏_k (λ - y_k) over the given samples."""
    matrix = _sample_matrix(samples)
    if matrix.shape[0] < 2:
        raise InvalidParameterError(f"need at least 2 samples, got {matrix.shape[0]}")
    return accumulate(matrix, LinearFactorProduct(points=[lam])).estimate()
