"""Tests for the averaged characteristic polynomial evaluators."""

import math

import numpy as np
import pytest
from scipy import special

from rmtsource.charpoly import (
    box_avg,
    box_avg_series,
    box_avg_series_scaled,
    chiral_avg_integral,
    chiral_avg_series,
    chiral_charpoly_statistic,
    elementary_symmetric,
    gauss_avg_combinatorial,
    gauss_avg_quadrature,
    incomplete_hermite_form,
    mc_product_estimate,
    wishart_avg,
)
from rmtsource.ensembles import make_draw, sample_shifted_goe
from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import ChiralSourceSpec
from rmtsource.montecarlo import LinearFactorProduct, estimate
from rmtsource.specfun import hermite


def _within(mc, exact, sigmas=4.0):
    return abs(mc.re - exact) <= sigmas * mc.se_re


# ---------------------------------------------------------------------------
# Gaussian closed forms
# ---------------------------------------------------------------------------


class TestGaussQuadrature:
    def test_single_factor(self):
        assert gauss_avg_quadrature(0.7, [0.0]) == pytest.approx(0.7)

    def test_zero_source_is_scaled_hermite(self):
        assert gauss_avg_quadrature(1.0, [0.0, 0.0]) == pytest.approx(0.5, rel=1e-14)

    @pytest.mark.parametrize("a", [0.0, 0.4, 1.3])
    def test_symmetric_pair(self, a):
        lam = 0.9
        assert gauss_avg_quadrature(lam, [a, -a]) == pytest.approx(lam**2 - 0.5 - a**2, rel=1e-13)

    def test_node_count_must_cover_degree(self):
        with pytest.raises(InvalidParameterError):
            gauss_avg_quadrature(1.0, [0.0] * 6, m=3)

    def test_minimal_node_count_is_exact(self):
        s = [0.3, -0.2, 1.0, 0.0, 0.5]
        assert gauss_avg_quadrature(0.4, s, m=3) == pytest.approx(gauss_avg_quadrature(0.4, s), rel=1e-12)

    def test_empty_source(self):
        assert gauss_avg_quadrature(2.0, []) == pytest.approx(1.0)


class TestGaussCombinatorial:
    def test_single_factor(self):
        assert gauss_avg_combinatorial(1.5, [0.25]) == 1.25

    @pytest.mark.parametrize("n", [1, 2, 5, 10])
    def test_zero_source_is_scaled_hermite(self, n):
        lam = 0.8
        expected = hermite(n, lam).to_float() / 2**n
        assert gauss_avg_combinatorial(lam, [0.0] * n) == pytest.approx(expected, rel=1e-12)

    def test_matches_quadrature_on_random_draws(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n = int(rng.integers(1, 9))
            s = rng.uniform(-2, 2, size=n)
            lam = rng.uniform(-2, 2)
            assert gauss_avg_combinatorial(lam, s) == pytest.approx(
                gauss_avg_quadrature(lam, s), rel=1e-10, abs=1e-10
            )

    def test_permutation_invariance(self):
        s = [0.3, -1.1, 0.7, 2.0]
        a = gauss_avg_combinatorial(0.2, s)
        b = gauss_avg_combinatorial(0.2, s[::-1])
        assert a == pytest.approx(b, rel=1e-14)
        assert gauss_avg_quadrature(0.2, s) == pytest.approx(gauss_avg_quadrature(0.2, s[::-1]), rel=1e-14)

    def test_size_limit(self):
        with pytest.raises(InvalidParameterError):
            gauss_avg_combinatorial(0.0, [0.0] * 31)


class TestIncompleteHermiteForm:
    def test_no_source_is_scaled_hermite(self):
        value = incomplete_hermite_form(1.1, 7, []).to_float()
        assert value == pytest.approx(hermite(7, 1.1).to_float() / 2**7, rel=1e-10)

    def test_degree_one(self):
        assert incomplete_hermite_form(0.6, 1, [0.25]).to_float() == pytest.approx(0.35, rel=1e-12)

    @pytest.mark.parametrize("n", [3, 8, 14, 20])
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_matches_quadrature(self, n, r):
        rng = np.random.default_rng(100 * n + r)
        x = list(rng.uniform(-1, 1, size=r))
        lam = float(rng.uniform(-1.5, 1.5))
        expected = gauss_avg_quadrature(lam, x + [0.0] * (n - r))
        value = incomplete_hermite_form(lam, n, x).to_float()
        assert value == pytest.approx(expected, rel=1e-9, abs=1e-12 * 2.0**n)

    def test_large_size_stays_finite_in_log_space(self):
        value = incomplete_hermite_form(math.sqrt(800.0), 400, [10.0])
        assert math.isfinite(value.log_abs)

    def test_too_many_entries(self):
        with pytest.raises(InvalidParameterError):
            incomplete_hermite_form(0.0, 1, [0.1, 0.2])


# ---------------------------------------------------------------------------
# Chiral closed forms
# ---------------------------------------------------------------------------


class TestChiral:
    def test_elementary_symmetric(self):
        np.testing.assert_allclose(elementary_symmetric([1.0, 2.0, 3.0]), [1, 6, 11, 6])

    @pytest.mark.parametrize("route", [chiral_avg_series, chiral_avg_integral])
    def test_no_rows_beyond_columns(self, route):
        assert route(1.3, 3, 0, []) == pytest.approx(1.3**3, rel=1e-12)

    @pytest.mark.parametrize("route", [chiral_avg_series, chiral_avg_integral])
    def test_square_single(self, route):
        assert route(0.8, 1, 1, [0.0]) == pytest.approx(0.8**2 - 1, rel=1e-10)

    def test_zero_source_is_laguerre(self):
        lam, n, p = 0.9, 5, 3
        expected = (-1) ** p * math.factorial(p) * lam ** (n - p) * special.eval_genlaguerre(p, n - p, lam**2)
        assert chiral_avg_series(lam, n, p, [0.0] * p) == pytest.approx(expected, rel=1e-12)

    def test_single_column(self):
        lam, n, s1 = 1.2, 4, 0.7
        expected = -(lam ** (n - 1)) * (special.eval_genlaguerre(1, n - 1, lam**2) + s1**2)
        assert chiral_avg_series(lam, n, 1, [s1]) == pytest.approx(expected, rel=1e-12)

    def test_series_matches_integral(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            p = int(rng.integers(1, 7))
            n = int(rng.integers(p, 11))
            s = rng.uniform(-1.5, 1.5, size=p)
            lam = float(rng.uniform(0.2, 2.0))
            series = chiral_avg_series(lam, n, p, s)
            integral = chiral_avg_integral(lam, n, p, s)
            assert integral == pytest.approx(series, rel=1e-8, abs=1e-10)

    def test_permutation_invariance(self):
        s = [0.2, 1.1, -0.4]
        assert chiral_avg_series(0.7, 4, 3, s) == pytest.approx(chiral_avg_series(0.7, 4, 3, s[::-1]), rel=1e-14)

    def test_rejects_short_side(self):
        with pytest.raises(InvalidParameterError):
            chiral_avg_series(1.0, 1, 2, [0.0, 0.0])


class TestWishartAndBox:
    def test_scalar_moment(self):
        assert wishart_avg(0.4, 1, 1, [1.5]) == pytest.approx(0.4 - 1 - 1.5, rel=1e-10)

    def test_zero_source_is_laguerre(self):
        lam, n, p = 1.7, 4, 2
        expected = (-1) ** p * math.factorial(p) * special.eval_genlaguerre(p, n - p, lam)
        assert wishart_avg(lam, n, p, [0.0, 0.0]) == pytest.approx(expected, rel=1e-9)

    def test_box_reduces_to_linear(self):
        assert box_avg(2.5, 0.0, 1, [0.0]) == pytest.approx(1.5, rel=1e-10)

    def test_box_single_column_formula(self):
        lam, a, m1 = 0.6, 1.3, 0.8
        expected = -special.eval_genlaguerre(1, a, lam) - m1
        assert box_avg(lam, a, 1, [m1]) == pytest.approx(expected, rel=1e-10)
        assert box_avg_series(lam, a, 1, [m1]) == pytest.approx(expected, rel=1e-13)

    def test_box_overlaps_wishart(self):
        assert box_avg(1.1, 2, 2, [2.0, 0.5]) == pytest.approx(wishart_avg(1.1, 4, 2, [2.0, 0.5]), rel=1e-10)

    def test_box_integral_matches_series_at_real_parameter(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = int(rng.integers(1, 5))
            a = float(rng.uniform(-0.7, 3.0))
            m = rng.uniform(0, 2, size=p)
            lam = float(rng.uniform(-2.0, 4.0))
            assert box_avg(lam, a, p, m) == pytest.approx(box_avg_series(lam, a, p, m), rel=1e-8, abs=1e-10)

    def test_damped_series(self):
        plain = box_avg_series_scaled(3.0, 0.5, 3, [1.0, 0.0, 0.0])
        damped = box_avg_series_scaled(3.0, 0.5, 3, [1.0, 0.0, 0.0], damped=True)
        assert damped.to_float() == pytest.approx(plain.to_float() * math.exp(-1.5), rel=1e-13)

    def test_rejects_bad_parameter(self):
        with pytest.raises(InvalidParameterError):
            box_avg(1.0, -1.0, 1, [0.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(InvalidParameterError):
            box_avg_series(1.0, 0.0, 2, [0.0])

    def test_rejects_negative_source(self):
        with pytest.raises(InvalidParameterError):
            wishart_avg(1.0, 2, 1, [-0.5])


# ---------------------------------------------------------------------------
# Monte Carlo agreement
# ---------------------------------------------------------------------------


class TestMonteCarlo:
    def test_constant_samples(self):
        result = mc_product_estimate(np.array([[0.5, 1.0], [0.5, 1.0], [0.5, 1.0]]), 2.0)
        assert result.re == pytest.approx(1.5)
        assert result.se == pytest.approx(0.0, abs=1e-14)

    def test_accepts_sample_records(self):
        samples = [sample_shifted_goe(2, [0.0, 0.0], seed) for seed in range(5)]
        result = mc_product_estimate(samples, 0.3)
        assert result.n_samples == 5

    def test_needs_two_samples(self):
        with pytest.raises(InvalidParameterError):
            mc_product_estimate(np.array([[0.1]]), 0.0)

    def test_goe_hermite_average(self):
        draw = make_draw("goe", source=[0.0] * 5)
        samples = draw(np.random.default_rng(31), 100_000)
        result = mc_product_estimate(samples, 1.0)
        assert _within(result, hermite(5, 1.0).to_float() / 32)

    @pytest.mark.parametrize("ensemble", ["goe", "gue"])
    @pytest.mark.parametrize("lam", [-0.8, 0.5, 1.7])
    def test_dense_samplers_match_closed_form(self, ensemble, lam):
        s = [1.0, -0.5, 0.0, 0.0]
        draw = make_draw(ensemble, source=s)
        result = estimate(draw, LinearFactorProduct(points=[lam]), 50_000, seed=5, workers=2)
        assert _within(result, gauss_avg_quadrature(lam, s))

    @pytest.mark.parametrize("beta", [1.0, 2.0])
    @pytest.mark.parametrize("lam", [-1.0, -0.3, 0.3, 0.8, 1.2])
    def test_recursive_sampler_matches_closed_form(self, beta, lam):
        s = [0.6, -0.4, 0.0]
        draw = make_draw("me", beta=beta, c=beta / 2.0, source=s)
        result = estimate(draw, LinearFactorProduct(points=[lam]), 50_000, seed=6, workers=2)
        assert _within(result, gauss_avg_quadrature(lam, s))

    def test_real_chiral_block_matrix(self):
        s = np.array([0.8, -0.3])
        spec = ChiralSourceSpec(n=3, p=2, field="real", mu=list(s**2))
        lam = 1.1
        result = estimate(make_draw("wishart", chiral=spec), chiral_charpoly_statistic(lam, 3, 2), 100_000, seed=8)
        assert _within(result, chiral_avg_series(lam, 3, 2, s))

    @pytest.mark.parametrize("field", ["real", "complex"])
    def test_wishart_with_source(self, field):
        spec = ChiralSourceSpec(n=4, p=2, field=field, mu=[2.0, 0.0])
        lam = 3.0
        result = estimate(make_draw("wishart", chiral=spec), LinearFactorProduct(points=[lam]), 100_000, seed=9, workers=2)
        assert _within(result, wishart_avg(lam, 4, 2, [2.0, 0.0]))
