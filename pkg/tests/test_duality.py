"""Tests for the two-sided duality checks."""

import math

import pytest

from rmtsource.duality import build_report, check_dr1, check_dr2, check_fr, check_w2, laguerre_wishart_spec
from rmtsource.exceptions import InvalidParameterError
from rmtsource.models import MCEstimate

SAMPLES = 20_000


def _mc(re: float, se: float, im: float = 0.0, se_im: float = 0.0) -> MCEstimate:
    return MCEstimate(re=re, im=im, se=math.hypot(se, se_im), se_re=se, se_im=se_im, n_samples=100)


class TestBuildReport:
    def test_pass_within_threshold(self):
        report = build_report("w2", {}, _mc(1.0, 0.1), _mc(1.2, 0.1), seed=0)
        assert report.z == pytest.approx(0.2 / math.sqrt(0.02))
        assert report.passed

    def test_fail_beyond_threshold(self):
        report = build_report("w2", {}, _mc(1.0, 0.01), MCEstimate.exact_value(2.0), seed=0)
        assert not report.passed
        assert report.z == pytest.approx(100.0)

    def test_imaginary_part_counts_when_real_expected(self):
        lhs = _mc(1.0, 0.1, im=1.0, se_im=0.1)
        rhs = _mc(1.0, 0.1, im=1.0, se_im=0.1)
        assert build_report("x", {}, lhs, rhs, seed=0).passed
        report = build_report("x", {}, lhs, rhs, seed=0, real_expected=True)
        assert report.imag_z == pytest.approx(10.0)
        assert not report.passed

    def test_roundoff_imaginary_part_is_ignored(self):
        lhs = _mc(-0.66, 0.01, im=1.2e-16, se_im=4.8e-19)
        report = build_report("fr", {}, lhs, MCEstimate.exact_value(-0.66), seed=0, real_expected=True)
        assert report.imag_z == 0.0
        assert report.passed

    def test_json_uses_schema_and_pass_keys(self):
        report = build_report("fr", {"N": 2}, _mc(0.0, 1.0), MCEstimate.exact_value(0.0), seed=7)
        data = report.to_json_dict()
        assert data["schema"] == "rmtsource/duality/v1"
        assert data["pass"] is True
        assert data["seed"] == 7
        assert data["params"] == {"N": 2}


class TestGaussianDualities:
    @pytest.mark.asyncio
    async def test_w2_smallest_case(self):
        report = await check_w2(2.0, 1, 1, 0.7, SAMPLES, seed=1)
        assert report.passed
        assert report.lhs.re == pytest.approx(0.7, abs=5 * report.lhs.se_re)
        assert report.rhs.re == pytest.approx(0.7, abs=5 * report.rhs.se_re)

    @pytest.mark.asyncio
    async def test_w2_goe_to_quaternion_side(self):
        report = await check_w2(1.0, 3, 2, 0.5, SAMPLES, seed=2, workers=2)
        assert report.passed
        assert report.params["beta"] == 1.0
        assert report.params["workers"] == 2

    @pytest.mark.asyncio
    async def test_fr_gue(self):
        report = await check_fr(2.0, 3, [1.0, 0.0, 0.0], 0.5, SAMPLES, seed=3)
        assert report.rhs.exact
        assert report.passed

    @pytest.mark.asyncio
    async def test_fr_general_beta(self):
        report = await check_fr(5.0, 3, [0.5, -0.3, 0.0], 1.0, SAMPLES, seed=4)
        assert report.passed

    @pytest.mark.asyncio
    async def test_fr_beta_three_real_sides(self):
        report = await check_fr(3.0, 3, [0.7, -0.7, 0.0], 1.2, SAMPLES, seed=7)
        assert report.lhs.im == 0.0
        assert report.lhs.se_im == 0.0
        assert report.imag_z == 0.0
        assert report.passed

    @pytest.mark.asyncio
    async def test_w2_real_side_has_no_imaginary_part(self):
        report = await check_w2(2.0, 1, 1, 0.7, 10_000, seed=1)
        assert report.lhs.im == 0.0
        assert report.rhs.se_im > 0.0
        assert report.passed

    @pytest.mark.asyncio
    async def test_fr_rejects_wrong_source_length(self):
        with pytest.raises(InvalidParameterError):
            await check_fr(2.0, 3, [1.0, 0.0], 0.5, 100)

    @pytest.mark.asyncio
    async def test_dr1_zero_sources_agrees_with_w2_at_origin(self):
        dr1 = await check_dr1(1.0, 2, 2, [0.0, 0.0], [0.0, 0.0], SAMPLES, seed=5)
        w2 = await check_w2(2.0, 2, 2, 0.0, SAMPLES, seed=5)
        assert dr1.passed
        # same draw, same stream: both left sides average ∏ y_k²
        assert dr1.lhs.re == pytest.approx(w2.lhs.re, rel=1e-9, abs=1e-12)

    @pytest.mark.asyncio
    async def test_dr1_with_sources(self):
        report = await check_dr1(0.5, 2, 1, [0.4, -0.2], [0.3], SAMPLES, seed=6)
        assert report.passed
        assert not report.real_expected

    @pytest.mark.asyncio
    async def test_rejects_nonpositive_beta(self):
        with pytest.raises(InvalidParameterError):
            await check_w2(0.0, 2, 2, 0.0, 100)


class TestChiralDuality:
    def test_wishart_realisation(self):
        complex_spec = laguerre_wishart_spec(2, 3, 1, [0.0, 1.0, 2.0])
        assert (complex_spec.n, complex_spec.field, complex_spec.entry_variance) == (4, "complex", 1.0)
        real_spec = laguerre_wishart_spec(1, 3, 1, [0.0, 1.0, 2.0])
        assert (real_spec.n, real_spec.field, real_spec.entry_variance) == (6, "real", 0.5)

    def test_half_integer_a_has_no_realisation(self):
        with pytest.raises(InvalidParameterError):
            laguerre_wishart_spec(2, 2, 0.5, [0.0, 0.0])

    @pytest.mark.asyncio
    async def test_dr2_unitary_single_column(self):
        report = await check_dr2(2, 1, 1, 0, [0.5], [1.5], SAMPLES, seed=7)
        assert report.rhs.exact
        assert report.rhs.re == pytest.approx(0.5 + 1.0 + 1.5)
        assert report.passed

    @pytest.mark.asyncio
    async def test_dr2_orthogonal_single_row(self):
        report = await check_dr2(1, 1, 1, 0, [0.5], [1.5], SAMPLES, seed=8)
        assert report.rhs.re == pytest.approx(0.5 + 2.0 + 3.0)
        assert report.passed

    @pytest.mark.asyncio
    async def test_dr2_orthogonal_two_columns(self):
        report = await check_dr2(1, 1, 2, 1, [0.3], [0.5, 1.0], SAMPLES, seed=9)
        assert report.passed

    @pytest.mark.asyncio
    async def test_dr2_sampled_dual_side(self):
        report = await check_dr2(2, 2, 2, 1, [0.5, 1.0], [0.2, 0.8], SAMPLES, seed=10)
        assert not report.rhs.exact
        assert report.passed

    @pytest.mark.asyncio
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"beta": 3, "n": 1, "p": 1, "a": 0, "s": [0.0], "m": [0.0]},
            {"beta": 1, "n": 2, "p": 1, "a": 0, "s": [0.0, 0.0], "m": [0.0]},
            {"beta": 2, "n": 1, "p": 1, "a": 0, "s": [0.0], "m": [-1.0]},
            {"beta": 2, "n": 2, "p": 1, "a": 0, "s": [-1.0, 0.0], "m": [0.0]},
        ],
    )
    async def test_dr2_rejects(self, kwargs):
        with pytest.raises(InvalidParameterError):
            await check_dr2(samples=100, **kwargs)


@pytest.mark.slow
class TestLargeRuns:
    @pytest.mark.asyncio
    async def test_w2_goe_million_samples(self):
        report = await check_w2(1.0, 4, 3, 0.8, 1_000_000, seed=11, workers=4)
        assert report.passed

    @pytest.mark.asyncio
    async def test_dr2_unitary_million_samples(self):
        report = await check_dr2(2, 2, 3, 1, [0.5, 1.5], [0.2, 0.8, 1.3], 1_000_000, seed=12, workers=4)
        assert report.passed
