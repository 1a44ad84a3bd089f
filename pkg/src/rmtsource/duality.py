"""Two-sided numerical checks of the duality identities.

Each check estimates both sides independently (Monte Carlo, or an exact
closed form where one exists) and reports a componentwise z-score. The two
Monte Carlo sides use separate random streams of the same master seed and
run concurrently.

Ensemble conventions:
    * ME_{β,N}(e^{-y²}; ξ) is ``draw_me_weight`` with c = 1, i.e. weight
      ∏|Δ|^β e^{-Σy²} ₀F₀^{(2/β)}(y; 2ξ).
    * ME_{β,p}(x^a e^{-x}; m) is the Wishart matrix (X+X0)†(X+X0) with
      p + a rows and E|x|² = 1 at β = 2, or p + 2a + 1 rows and variance 1/2
      at β = 1, and X0ᵀX0 = diag(m).
"""

from __future__ import annotations

import asyncio
import math
from typing import Any, Sequence

import numpy as np

from rmtsource.charpoly import box_avg, gauss_avg_quadrature
from rmtsource.ensembles import make_draw
from rmtsource.exceptions import InvalidParameterError
from rmtsource.logging import get_logger
from rmtsource.models import ChiralSourceSpec, DualityReport, MCEstimate
from rmtsource.montecarlo import (
    DEFAULT_CHUNK_SIZE,
    LHS_STREAM,
    RHS_STREAM,
    LinearFactorProduct,
    estimate_async,
    z_score,
)

logger = get_logger("duality")

DEFAULT_THRESHOLD = 4.0
EXACT_IMAG_TOL = 1e-12
ROUNDOFF_IMAG_TOL = 1e-13


def _imag_score(side: MCEstimate) -> float:
    if side.overflow:
        return math.inf
    im = abs(side.im or 0.0)
    if side.exact:
        return 0.0 if im <= EXACT_IMAG_TOL * max(1.0, abs(side.re or 0.0)) else math.inf
    # Imaginary parts at rounding level carry no sampling information.
    roundoff = ROUNDOFF_IMAG_TOL * max(1.0, abs(side.re or 0.0))
    if im <= roundoff and side.se_im <= roundoff:
        return 0.0
    return im / side.se_im if side.se_im > 0 else math.inf


def build_report(
    check: str,
    params: dict[str, Any],
    lhs: MCEstimate,
    rhs: MCEstimate,
    *,
    seed: int,
    threshold: float = DEFAULT_THRESHOLD,
    real_expected: bool = False,
) -> DualityReport:
    """Combine two sides into a report; the larger component z-score wins."""
    z_re, z_im = z_score(lhs, rhs)
    z = max(z_re, z_im)
    passed = z <= threshold
    imag_z = None
    if real_expected:
        imag_z = max(_imag_score(lhs), _imag_score(rhs))
        passed = passed and imag_z <= threshold
    report = DualityReport(
        check=check,
        params=params,
        lhs=lhs,
        rhs=rhs,
        z=z,
        passed=passed,
        seed=seed,
        threshold=threshold,
        real_expected=real_expected,
        imag_z=imag_z,
    )
    verdict = "passed" if passed else "FAILED"
    logger.info(f"{check} check {verdict}: z={z:.3f} (threshold {threshold})")
    return report


def _vector(values: Sequence[float], length: int, name: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float).reshape(-1)
    if vector.shape[0] != length:
        raise InvalidParameterError(f"{name} must have length {length}, got {vector.shape[0]}")
    if not np.all(np.isfinite(vector)):
        raise InvalidParameterError(f"{name} entries must be finite")
    return vector


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise InvalidParameterError(f"{name} must be > 0, got {value}")


def _check_size(name: str, value: int) -> None:
    if value < 1:
        raise InvalidParameterError(f"{name} must be >= 1, got {value}")


async def _two_sided(
    lhs: tuple,
    rhs: tuple,
    samples: int,
    seed: int,
    workers: int,
    chunk_size: int,
) -> tuple[MCEstimate, MCEstimate]:
    left, right = await asyncio.gather(
        estimate_async(*lhs, samples, seed, stream=LHS_STREAM, workers=workers, chunk_size=chunk_size),
        estimate_async(*rhs, samples, seed, stream=RHS_STREAM, workers=workers, chunk_size=chunk_size),
    )
    return left, right


# ---------------------------------------------------------------------------
# Gaussian side
# ---------------------------------------------------------------------------


async def check_w2(
    beta: float,
    N: int,
    n: int,
    x: float,
    samples: int,
    *,
    seed: int = 0,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threshold: float = DEFAULT_THRESHOLD,
) -> DualityReport:
    """⟨∏_j (x - √(2/β)λ_j)^n⟩_{β,N} against ⟨∏_k (x - iλ_k)^N⟩_{4/β,n}."""
    _check_positive("beta", beta)
    _check_size("N", N)
    _check_size("n", n)
    lhs = (
        make_draw("me", beta=beta, c=1.0, source=np.zeros(N)),
        LinearFactorProduct(points=[x], scale=-math.sqrt(2.0 / beta), power=n),
    )
    rhs = (
        make_draw("me", beta=4.0 / beta, c=1.0, source=np.zeros(n)),
        LinearFactorProduct(points=[x], scale=-1j, power=N),
    )
    left, right = await _two_sided(lhs, rhs, samples, seed, workers, chunk_size)
    params = {"beta": beta, "N": N, "n": n, "x": x, "samples": samples, "workers": workers}
    return build_report("w2", params, left, right, seed=seed, threshold=threshold, real_expected=True)


async def check_fr(
    beta: float,
    N: int,
    x: Sequence[float],
    lam: float,
    samples: int,
    *,
    seed: int = 0,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threshold: float = DEFAULT_THRESHOLD,
) -> DualityReport:
    """Monte Carlo ⟨∏(λ - y_k)⟩ over ME_{β,N}(e^{-βy²/2}; x) against the Gaussian closed form."""
    _check_positive("beta", beta)
    _check_size("N", N)
    source = _vector(x, N, "x")
    draw = make_draw("me", beta=beta, c=beta / 2.0, source=source)
    left = await estimate_async(
        draw,
        LinearFactorProduct(points=[lam]),
        samples,
        seed,
        stream=LHS_STREAM,
        workers=workers,
        chunk_size=chunk_size,
    )
    right = MCEstimate.exact_value(gauss_avg_quadrature(lam, source))
    params = {
        "beta": beta,
        "N": N,
        "x": source.tolist(),
        "lambda": lam,
        "samples": samples,
        "workers": workers,
    }
    return build_report("fr", params, left, right, seed=seed, threshold=threshold, real_expected=True)


async def check_dr1(
    alpha: float,
    N: int,
    n: int,
    xi: Sequence[float],
    sigma: Sequence[float],
    samples: int,
    *,
    seed: int = 0,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threshold: float = DEFAULT_THRESHOLD,
) -> DualityReport:
    """Source duality on the slice x = iξ, s = iσ, where both sources are real.

    LHS: ⟨∏_{j,k} (iσ_j - √α y_k)⟩ over ME_{2/α,N}(e^{-y²}; ξ).
    RHS: i^{nN} ⟨∏_{j,k} (y_k + i√α ξ_j)⟩ over ME_{2α,n}(e^{-y²}; σ).
    """
    _check_positive("alpha", alpha)
    _check_size("N", N)
    _check_size("n", n)
    xi = _vector(xi, N, "xi")
    sigma = _vector(sigma, n, "sigma")
    root = math.sqrt(alpha)
    lhs = (
        make_draw("me", beta=2.0 / alpha, c=1.0, source=xi),
        LinearFactorProduct(points=list(1j * sigma), scale=-root),
    )
    rhs = (
        make_draw("me", beta=2.0 * alpha, c=1.0, source=sigma),
        LinearFactorProduct(points=list(1j * root * xi), scale=1.0, prefactor=1j ** ((n * N) % 4)),
    )
    left, right = await _two_sided(lhs, rhs, samples, seed, workers, chunk_size)
    params = {
        "alpha": alpha,
        "N": N,
        "n": n,
        "xi": xi.tolist(),
        "sigma": sigma.tolist(),
        "samples": samples,
        "workers": workers,
    }
    return build_report("dr1", params, left, right, seed=seed, threshold=threshold)


# ---------------------------------------------------------------------------
# Chiral side
# ---------------------------------------------------------------------------


def laguerre_wishart_spec(beta: int, p: int, a: float, m: Sequence[float]) -> ChiralSourceSpec:
    """Wishart realisation of ME_{β,p}(x^a e^{-x}; m) for β in {1, 2}."""
    if beta == 2:
        rows = p + a
        field, variance = "complex", 1.0
    else:
        rows = p + 2 * a + 1
        field, variance = "real", 0.5
    if rows != int(rows) or a < 0:
        raise InvalidParameterError(
            f"a={a} has no Wishart realisation at beta={beta} (need an integer row count)"
        )
    return ChiralSourceSpec(
        n=int(rows), p=p, field=field, mu=list(m), entry_variance=variance
    )


async def check_dr2(
    beta: int,
    n: int,
    p: int,
    a: float,
    s: Sequence[float],
    m: Sequence[float],
    samples: int,
    *,
    seed: int = 0,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threshold: float = DEFAULT_THRESHOLD,
) -> DualityReport:
    """⟨∏_{j,k}(s_j + (2/β)x_k)⟩_{β,p,a,m} against ⟨∏_{j,k}(x_j + (2/β)m_k)⟩_{4/β,n,(2/β)(a+1)-1,s}.

    At n = 1 the right-hand side is the exact Laguerre integral; otherwise
    only β = 2 (self-dual, both sides complex Wishart) is sampleable.
    """
    if beta not in (1, 2):
        raise InvalidParameterError(f"chiral duality needs beta in {{1, 2}}, got {beta}")
    _check_size("n", n)
    _check_size("p", p)
    s = _vector(s, n, "s")
    m = _vector(m, p, "m")
    if np.any(m < 0):
        raise InvalidParameterError("m entries must be nonnegative")
    if beta == 1 and n != 1:
        raise InvalidParameterError("beta = 1 is only checkable at n = 1")

    scale = 2.0 / beta
    lhs_spec = laguerre_wishart_spec(beta, p, a, m)
    lhs = (
        make_draw("wishart", chiral=lhs_spec),
        LinearFactorProduct(points=list(s), scale=scale),
    )
    params = {
        "beta": beta,
        "n": n,
        "p": p,
        "a": a,
        "s": s.tolist(),
        "m": m.tolist(),
        "samples": samples,
        "workers": workers,
    }

    if n == 1:
        left = await estimate_async(
            *lhs, samples, seed, stream=LHS_STREAM, workers=workers, chunk_size=chunk_size
        )
        dual_a = scale * (a + 1.0) - 1.0
        exact = box_avg(-float(s[0]), dual_a, p, scale * m)
        right = MCEstimate.exact_value(-exact if p % 2 else exact)
    else:
        if np.any(s < 0):
            raise InvalidParameterError("s entries must be nonnegative for the sampled dual side")
        rhs_spec = laguerre_wishart_spec(2, n, a, s)
        rhs = (
            make_draw("wishart", chiral=rhs_spec),
            LinearFactorProduct(points=list(m), scale=1.0),
        )
        left, right = await _two_sided(lhs, rhs, samples, seed, workers, chunk_size)
    return build_report("dr2", params, left, right, seed=seed, threshold=threshold, real_expected=True)
