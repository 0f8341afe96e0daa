"""Singular values against numpy and the Golub-Kahan oracle, plus norm quantities."""

import math

import numpy as np
import pytest
from scipy import sparse

from app.core.exceptions import (
    DataError,
    ParameterError,
    ShapeError
)
from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec,
    SeedSpec
)
from app.services.ensemble import sample_matrix
from app.services.matrix import Matrix
from app.services.spectral import (
    FULL_SVD_RTOL,
    bvh_bound,
    column_span_distance,
    column_span_distances,
    condition_number,
    exact_rank,
    full_svd_singular_values,
    golub_kahan_singular_values,
    is_numerically_singular,
    jacobi_svd,
    largest_singular_value,
    norm_quantities,
    smallest_singular_estimate,
    smallest_singular_value,
    spectral_summary
)
from app.utils.exact_rank import bareiss_rank


def _gaussian(rows, cols, seed=42):
    return np.random.default_rng(seed).standard_normal((rows, cols))


class TestFullSvd:

    @pytest.mark.parametrize("shape", [(1, 1), (2, 2), (7, 7), (12, 12), (15, 9), (9, 15), (30, 30)])
    def test_jacobi_matches_numpy(self, shape):
        a = _gaussian(*shape)
        expected = np.linalg.svd(a, compute_uv=False)
        np.testing.assert_allclose(full_svd_singular_values(Matrix(dense=a)), expected, rtol=1e-10)

    @pytest.mark.parametrize("shape", [(2, 2), (8, 8), (13, 6), (6, 13)])
    def test_golub_kahan_matches_jacobi(self, shape):
        m = Matrix(dense=_gaussian(*shape, seed=7))
        np.testing.assert_allclose(golub_kahan_singular_values(m), full_svd_singular_values(m), rtol=1e-9)

    def test_residual(self):
        result = jacobi_svd(Matrix(dense=_gaussian(20, 20)))
        assert result.residual <= FULL_SVD_RTOL
        assert np.all(np.diff(result.values) <= 0.0)

    def test_graded_matrix_keeps_relative_accuracy(self):
        d = np.array([1.0, 1e-4, 1e-8, 1e-12])
        values = full_svd_singular_values(Matrix(dense=np.diag(d)))
        np.testing.assert_allclose(values, d, rtol=1e-10)

    def test_non_finite_rejected(self):
        with pytest.raises(DataError):
            jacobi_svd(Matrix.from_rows([[1.0, math.inf], [0.0, 1.0]]))


class TestExtremes:

    def test_largest_matches_numpy(self):
        a = _gaussian(60, 60)
        assert largest_singular_value(Matrix(dense=a)) == pytest.approx(np.linalg.norm(a, 2), rel=1e-8)

    def test_largest_sparse_storage(self):
        spec = EnsembleSpec(n=80, p=0.1)
        m = sample_matrix(spec, SeedSpec(master_seed=3))
        sparse_copy = Matrix(csr=sparse.csr_matrix(m.dense))
        assert largest_singular_value(sparse_copy) == pytest.approx(np.linalg.norm(m.dense, 2), rel=1e-8)

    def test_largest_of_zero_matrix(self):
        assert largest_singular_value(Matrix(dense=np.zeros((3, 3)))) == 0.0

    @pytest.mark.parametrize("n", [5, 50, 120])
    def test_smallest_matches_numpy(self, n):
        a = _gaussian(n, n, seed=n)
        expected = np.linalg.svd(a, compute_uv=False)[-1]
        assert smallest_singular_value(Matrix(dense=a)) == pytest.approx(expected, rel=1e-6)

    def test_smallest_rectangular(self):
        a = _gaussian(40, 25)
        expected = np.linalg.svd(a, compute_uv=False)[-1]
        assert smallest_singular_value(Matrix(dense=a)) == pytest.approx(expected, rel=1e-6)

    def test_rank_one(self):
        estimate = smallest_singular_estimate(Matrix.from_rows([[1.0, 1.0], [1.0, 1.0]]))
        assert estimate.value == 0.0
        assert estimate.singular

    def test_condition_number(self):
        m = Matrix(dense=np.diag([4.0, 2.0, 0.5]))
        assert condition_number(m) == pytest.approx(8.0, rel=1e-9)
        assert condition_number(Matrix.from_rows([[1.0, 1.0], [1.0, 1.0]])) == math.inf

    def test_condition_needs_square(self):
        with pytest.raises(ShapeError):
            condition_number(Matrix(dense=np.ones((2, 3))))

    def test_numerical_singularity(self):
        a = _gaussian(6, 6)
        a[:, 5] = a[:, 0] + a[:, 1]
        assert is_numerically_singular(Matrix(dense=a))
        assert not is_numerically_singular(Matrix.identity(6))


def _householder(n, seed):
    v = np.random.default_rng(seed).standard_normal(n)
    return np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)


def _sanity_matrices():
    yield "gaussian", _gaussian(12, 12, seed=5)
    yield "tall", _gaussian(20, 8, seed=6)
    yield "ones", np.ones((4, 4))
    yield "diagonal", np.diag([3.0, 1e-3, 2.0, 0.5])
    yield "rademacher", sample_matrix(
        EnsembleSpec(n=40, p=0.3, dist=EntryDistribution.rademacher()), SeedSpec(master_seed=17)
    ).dense


class TestInvariants:

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
    @pytest.mark.parametrize("seed", [0, 1])
    def test_product_equals_abs_determinant(self, n, seed):
        a = _gaussian(n, n, seed=100 * n + seed)
        values = full_svd_singular_values(Matrix(dense=a))
        assert math.prod(values) == pytest.approx(abs(np.linalg.det(a)), rel=1e-6)

    @pytest.mark.parametrize("shape", [(2, 2), (9, 9), (15, 6)])
    def test_orthogonal_invariance(self, shape):
        a = _gaussian(*shape, seed=23)
        q = _householder(shape[0], seed=29)
        np.testing.assert_allclose(
            full_svd_singular_values(Matrix(dense=q @ a)),
            full_svd_singular_values(Matrix(dense=a)),
            rtol=1e-9,
        )

    @pytest.mark.parametrize("c", [-1.0, -2.0, 0.25, 1024.0])
    def test_scaling(self, c):
        a = _gaussian(10, 10, seed=31)
        np.testing.assert_allclose(
            full_svd_singular_values(Matrix(dense=c * a)),
            abs(c) * np.asarray(full_svd_singular_values(Matrix(dense=a))),
            rtol=1e-12,
        )

    @pytest.mark.parametrize("name, a", list(_sanity_matrices()))
    def test_smallest_below_every_column_norm(self, name, a):
        m = Matrix(dense=a)
        bound = float(np.min(np.linalg.norm(a, axis=0)))
        slack = 1e-12 * max(1.0, bound)
        assert full_svd_singular_values(m)[-1] <= bound + slack
        assert smallest_singular_value(m) <= bound + slack


class TestSummary:

    @pytest.mark.parametrize("method", ["iterative", "full_svd"])
    def test_identity(self, method):
        summary = spectral_summary(Matrix.identity(4), method)
        assert summary.s_min == pytest.approx(1.0, rel=1e-12)
        assert summary.s_max == pytest.approx(1.0, rel=1e-12)
        assert summary.cond == pytest.approx(1.0, rel=1e-12)
        assert not summary.singular

    @pytest.mark.parametrize("method", ["iterative", "full_svd"])
    def test_rank_one_json(self, method):
        summary = spectral_summary(Matrix.from_rows([[1.0, 1.0], [1.0, 1.0]]), method)
        assert summary.s_min == 0.0
        assert summary.singular
        assert summary.model_dump(mode="json")["cond"] == "inf"

    def test_methods_agree(self):
        m = Matrix(dense=_gaussian(25, 25))
        iterative = spectral_summary(m, "iterative")
        full = spectral_summary(m, "full_svd")
        assert iterative.s_min == pytest.approx(full.s_min, rel=1e-6)
        assert iterative.s_max == pytest.approx(full.s_max, rel=1e-8)


class TestExactRank:

    def test_bareiss(self):
        assert bareiss_rank([[2, 4, 6], [1, 2, 3], [0, 0, 1]]) == 2
        assert bareiss_rank([[0, 1], [1, 0]]) == 2
        assert bareiss_rank([[0, 0], [0, 0]]) == 0
        assert bareiss_rank([]) == 0

    def test_dyadic_values(self):
        m = Matrix.from_rows([[0.5, 0.25], [1.0, 0.5]])
        assert exact_rank(m) == 1
        assert exact_rank(Matrix.identity(5)) == 5

    def test_integer_matrix(self):
        a = np.random.default_rng(42).integers(-1, 2, size=(12, 12)).astype(float)
        a[11] = a[0] - a[3]
        assert exact_rank(Matrix(dense=a)) == np.linalg.matrix_rank(a)


class TestColumnDistances:

    def test_identity(self):
        np.testing.assert_allclose(column_span_distances(Matrix.identity(4)), 1.0)
        assert column_span_distance(Matrix.identity(3), 1) == pytest.approx(1.0)

    def test_dependent_column(self):
        m = Matrix.from_rows([[1.0, 1.0], [1.0, 1.0]])
        assert column_span_distance(m, 0) == 0.0
        np.testing.assert_array_equal(column_span_distances(m), [0.0, 0.0])

    def test_inverse_formula_matches_least_squares(self):
        m = Matrix(dense=_gaussian(10, 10))
        direct = [column_span_distance(m, j) for j in range(10)]
        np.testing.assert_allclose(column_span_distances(m), direct, rtol=1e-8)

    def test_sandwich(self):
        spec = EnsembleSpec(n=40, p=0.5, dist=EntryDistribution.gaussian())
        for trial in range(5):
            m = sample_matrix(spec, SeedSpec(master_seed=11, trial_index=trial))
            s_min = smallest_singular_value(m)
            distances = column_span_distances(m)
            assert np.all(s_min <= distances * (1.0 + 1e-8))
            assert distances.min() <= math.sqrt(40) * s_min * (1.0 + 1e-8)

    def test_index_checked(self):
        with pytest.raises(ParameterError):
            column_span_distance(Matrix.identity(3), 3)


class TestNormQuantities:

    def test_values(self):
        b = Matrix.from_rows([[3.0, 0.0], [4.0, 0.0]])
        q = norm_quantities(b, eps=0.5)
        assert q.seginer == 5.0
        assert q.sigma1 == 4.0
        assert q.sigma2 == 5.0
        assert q.sigma_star == 4.0
        expected = 1.5 * (4.0 + 5.0 + 5.0 * 4.0 * math.sqrt(math.log(2.0)) / math.sqrt(math.log(1.5)))
        assert q.bvh_bound == pytest.approx(expected, rel=1e-12)

    def test_bound_dominates_norm_of_gaussian_band(self):
        a = _gaussian(200, 200) * (np.abs(np.subtract.outer(np.arange(200), np.arange(200))) < 5)
        b = Matrix(dense=a)
        assert bvh_bound(b) >= largest_singular_value(b)
