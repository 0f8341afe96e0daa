"""Sphere decomposition, LCD search and threshold calculators."""

import math

import numpy as np
import pytest
from scipy import special

from app.core.exceptions import (
    DataError,
    DomainError,
    ParameterError
)
from app.schemas.geometry import LcdParams
from app.services.geometry import (
    UnitVector,
    classify_vector,
    coerce_unit_vector,
    dist_to_sparse,
    is_dominated,
    lattice_distance,
    lcd,
    lcd_lower_bounds,
    lcd_report,
    levy_concentration,
    moment_threshold_q,
    rearranged_segment,
    resolve_lcd_params,
    spread_ratio,
    threshold_params
)


def _first_satisfying(coords, s, lo, hi, step):
    """Brute-force scan of dist(theta x, Z^n) < sqrt(log_+(s theta)) / s."""
    thetas = np.arange(lo, hi, step)
    scaled = np.multiply.outer(thetas, coords)
    distance = np.sqrt(((scaled - np.round(scaled)) ** 2).sum(axis=1))
    threshold = np.sqrt(np.log(np.maximum(s * thetas, 1.0))) / s
    hits = np.flatnonzero(distance < threshold)
    return float(thetas[hits[0]]) if hits.size else math.inf


class TestUnitVector:

    def test_rearrangement(self):
        x = UnitVector.normalized([1.0, -3.0, 2.0, 2.0])
        np.testing.assert_array_equal(x.perm, [1, 2, 3, 0])
        assert x.sup_norm == pytest.approx(3.0 / math.sqrt(18.0))

    def test_segment(self):
        x = UnitVector.normalized([1.0, -3.0, 2.0, 2.0])
        segment = rearranged_segment(x, 2, 3)
        np.testing.assert_array_equal(np.flatnonzero(segment), [2, 3])
        with pytest.raises(ParameterError):
            rearranged_segment(x, 3, 2)
        with pytest.raises(ParameterError):
            rearranged_segment(x, 0, 2)

    @pytest.mark.parametrize("coords", [[], [1.0, math.nan], [0.5, 0.5]])
    def test_rejected(self, coords):
        with pytest.raises(DataError):
            UnitVector(coords)

    @pytest.mark.parametrize("ranks", [[(1, 9)], [(1, 2), (3, 3), (4, 7), (8, 9)], [(k, k) for k in range(1, 10)]])
    def test_segments_reassemble_vector(self, ranks):
        x = UnitVector.normalized(np.random.default_rng(8).standard_normal(9))
        segments = [rearranged_segment(x, lo, hi) for lo, hi in ranks]
        supports = [set(np.flatnonzero(segment)) for segment in segments]
        assert sum(len(support) for support in supports) == len(set().union(*supports))
        np.testing.assert_array_equal(np.sum(segments, axis=0), x.coords)

    @pytest.mark.parametrize("m", [1, 4, 11])
    def test_head_and_tail_are_pythagorean(self, m):
        x = UnitVector.normalized(np.random.default_rng(m).standard_normal(12))
        head = rearranged_segment(x, 1, m)
        tail = rearranged_segment(x, m + 1, 12)
        assert head @ head + tail @ tail == pytest.approx(1.0, abs=1e-12)

    def test_coerce_renormalises_small_drift(self):
        x = coerce_unit_vector([0.6, 0.8 + 1e-8])
        assert np.linalg.norm(x.coords) == pytest.approx(1.0, abs=1e-12)

    def test_coerce_rejects_large_drift(self):
        with pytest.raises(DataError):
            coerce_unit_vector([1.0, 1.0])


class TestClassification:

    def test_incompressible_at_level_one(self):
        x = UnitVector([0.8, 0.6, 0.0, 0.0])
        result = classify_vector(x, 1, rho=0.5, alpha=0.5)
        assert result.dist_to_sparse == pytest.approx(0.6)
        assert result.incompressible and not result.compressible
        assert not result.dominated
        assert is_dominated(x, 1, alpha=1.5)

    def test_sparse_vector_is_compressible(self):
        x = UnitVector([0.8, 0.6, 0.0, 0.0])
        result = classify_vector(x, 2, rho=0.01, alpha=0.1)
        assert result.compressible
        assert result.dominated
        assert result.tail_sup == 0.0

    @pytest.mark.parametrize("n", [2, 4, 10, 64])
    def test_uniform_vector_at_half_level(self, n):
        x = UnitVector.normalized(np.ones(n))
        assert not is_dominated(x, n // 2, alpha=0.5)
        assert is_dominated(x, n // 2, alpha=1.5)

    @pytest.mark.parametrize("m, support", [(1, [3]), (3, [0, 5]), (3, [1, 2, 7]), (8, range(8))])
    @pytest.mark.parametrize("alpha", [1e-9, 0.5, 1.0, 100.0])
    def test_sparse_vectors_are_dominated(self, m, support, alpha):
        coords = np.zeros(8)
        coords[list(support)] = np.random.default_rng(m).standard_normal(len(support))
        x = UnitVector.normalized(coords)
        assert is_dominated(x, m, alpha)
        assert classify_vector(x, m, rho=1e-9, alpha=alpha).compressible

    def test_distance_decreases_with_level(self):
        x = UnitVector.normalized(np.arange(1.0, 11.0))
        distances = [dist_to_sparse(x, m) for m in range(1, 11)]
        assert np.all(np.diff(distances) <= 0.0)
        assert distances[-1] == 0.0


class TestLcd:

    def test_lattice_distance(self):
        np.testing.assert_allclose(lattice_distance([0.5, 2.0], np.array([1.0, 0.25])), [0.5, 0.5])

    def test_two_coordinate_vector_matches_brute_force(self):
        coords = np.array([1.0, 1.0, 0.0, 0.0]) / math.sqrt(2.0)
        params = LcdParams(p=0.01, delta0=0.1, grid_step=1e-4)
        s = math.sqrt(0.001)
        expected = _first_satisfying(coords, s, 1.0 / s, 1.0 / s + 1.0, 1e-6)
        assert lcd(UnitVector(coords), params) == pytest.approx(expected, abs=2e-6)

    def test_basis_vector(self):
        x = UnitVector([1.0, 0.0, 0.0, 0.0])
        report = lcd_report(x, LcdParams(p=0.01, delta0=0.1))
        assert report.lower_bounds.universal == pytest.approx(31.6227766, rel=1e-8)
        assert report.lower_bounds.sup_norm == pytest.approx(0.5)
        assert report.lower_bounds.universal <= report.lcd <= 32.0

    def test_cap_below_lower_bound(self):
        x = UnitVector([1.0, 0.0])
        report = lcd_report(x, LcdParams(p=0.01, delta0=0.1, theta_max=10.0, grid_step=0.001))
        assert report.lcd == math.inf
        assert report.grid_points == 0
        assert report.model_dump(mode="json")["lcd"] == "inf"

    def test_value_satisfies_inequality(self):
        x = UnitVector.normalized(np.random.default_rng(42).standard_normal(6))
        params = LcdParams(p=0.2, delta0=0.1)
        value = lcd(x, params)
        s = math.sqrt(0.02)
        assert value >= lcd_lower_bounds(x, params).universal
        assert lattice_distance([value], x.coords)[0] < math.sqrt(math.log(s * value)) / s

    def test_no_grid_point_below_the_value_qualifies(self):
        x = UnitVector.normalized(np.random.default_rng(5).standard_normal(50))
        params = LcdParams(p=0.5, delta0=0.5, grid_step=1e-3)
        report = lcd_report(x, params)
        assert math.isfinite(report.lcd)

        s = 0.5
        theta_lo = max(report.lower_bounds.universal, report.lower_bounds.sup_norm)
        eligible = np.arange(int((report.lcd - 2.0 * params.grid_step - theta_lo) / params.grid_step))
        assert eligible.size >= 100
        k = np.random.default_rng(6).choice(eligible, size=100, replace=False)
        thetas = theta_lo + k * params.grid_step
        scaled = np.multiply.outer(thetas, x.coords)
        distance = np.sqrt(((scaled - np.rint(scaled)) ** 2).sum(axis=1))
        threshold = np.sqrt(np.log(np.maximum(s * thetas, 1.0))) / s
        assert np.all(distance + 1e-12 >= threshold)

        scaled = report.lcd * x.coords
        assert np.linalg.norm(scaled - np.rint(scaled)) < math.sqrt(math.log(s * report.lcd)) / s

    def test_default_resolution(self):
        theta_max, grid_step, s = resolve_lcd_params(LcdParams(p=0.1, delta0=0.1), 100)
        assert s == pytest.approx(0.1)
        assert theta_max == pytest.approx(1000.0)
        assert grid_step == pytest.approx(1e-2)

    @pytest.mark.parametrize("update", [{"p": 0.0}, {"delta0": 1.0}, {"grid_step": 5.0}])
    def test_invalid_params(self, update):
        params = LcdParams(p=0.1, delta0=0.1, theta_max=100.0).model_copy(update=update)
        with pytest.raises(ParameterError):
            resolve_lcd_params(params, 4)


class TestLevyConcentration:

    def test_scalar(self):
        assert levy_concentration([0.0, 0.0, 0.0, 1.0], 0.5) == 0.75
        assert levy_concentration([0.0, 1.0, 2.0, 3.0], 1.0) == 0.75

    def test_vectors(self):
        points = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [0.0, 0.1]])
        assert levy_concentration(points, 0.2) == 0.75

    def test_two_point_law(self):
        samples = 10.0 * np.random.default_rng(12).integers(0, 2, size=100_000)
        assert levy_concentration(samples, 1.0) == pytest.approx(0.5, abs=0.01)

    def test_gaussian_calibration(self):
        samples = np.random.default_rng(13).standard_normal(100_000)
        assert levy_concentration(samples, 1.0) == pytest.approx(special.erf(1.0 / math.sqrt(2.0)), abs=0.01)

    def test_point_mass_and_monotone_radius(self):
        assert levy_concentration(np.full(200, 3.0), 1e-9) == 1.0
        samples = np.random.default_rng(14).standard_normal(500)
        estimates = [levy_concentration(samples, eps) for eps in (0.05, 0.1, 0.2, 0.4, 0.8)]
        assert np.all(np.diff(estimates) >= 0.0)
        assert estimates[0] >= 1.0 / 500

    def test_invalid(self):
        with pytest.raises(ParameterError):
            levy_concentration([], 0.1)
        with pytest.raises(ParameterError):
            levy_concentration([1.0], 0.0)


class TestThresholds:

    def test_moment_threshold(self):
        assert moment_threshold_q(0.5) == pytest.approx(6.0)
        with pytest.raises(DomainError):
            moment_threshold_q(1.0)

    def test_threshold_params(self):
        t = threshold_params(K=1.0, R=1.0, p=0.01, n=10000)
        assert t.ell0 == 2
        assert t.rho == pytest.approx(4.0 ** -8)
        assert t.alpha_dom == pytest.approx(1.0 / 256.0)
        assert (t.m_min, t.m_max) == (100, 5000)

    def test_threshold_domain(self):
        with pytest.raises(DomainError):
            threshold_params(K=1.0, R=1.0, p=0.01, n=50)
        with pytest.raises(DomainError):
            threshold_params(K=1.0, R=1.0, p=0.2, n=1000)
        with pytest.raises(ParameterError):
            threshold_params(K=0.5, R=1.0, p=0.01, n=10000)

    def test_spread_ratio(self):
        assert spread_ratio(np.array([3.0, 4.0, 0.0]), 1) == pytest.approx(1.0)
        assert spread_ratio(np.array([1.0, 1.0, 1.0, 1.0]), 0) == pytest.approx(1.0 / math.sqrt(3.0))
        assert spread_ratio(np.array([0.0, 5.0]), 1) is None
