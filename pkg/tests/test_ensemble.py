"""Sampling, structural transforms and closed-form entry-law facts."""

import math

import numpy as np
import pytest
from scipy import stats

from app.core.exceptions import (
    DomainError,
    ParameterError,
    ShapeError
)
from app.schemas.ensemble import (
    EntryDistribution,
    EnsembleSpec,
    SeedSpec
)
from app.services.ensemble import (
    abs_moment,
    fold_matrix,
    moment_exponent_ok,
    moment_growth_beta,
    omega_shift,
    pareto_scale,
    pattern_count,
    pattern_row_probability,
    psi2_norm,
    sample_auto,
    sample_directed_er,
    sample_entries,
    sample_matrix,
    sample_matrix_sparse,
    tail_probability,
    zero_row_count
)
from app.services.matrix import Matrix
from app.utils.prng import trial_streams


class TestSampling:

    def test_deterministic(self, rademacher_spec, seed):
        assert sample_matrix(rademacher_spec, seed) == sample_matrix(rademacher_spec, seed)

    def test_trials_differ(self, rademacher_spec):
        a = sample_matrix(rademacher_spec, SeedSpec(master_seed=1, trial_index=0))
        b = sample_matrix(rademacher_spec, SeedSpec(master_seed=1, trial_index=1))
        assert a != b

    @pytest.mark.parametrize("block_rows", [1, 3, 7, 30])
    def test_row_blocks_match_dense(self, rademacher_spec, seed, block_rows):
        dense = sample_matrix(rademacher_spec, seed)
        blocked = sample_matrix_sparse(rademacher_spec, seed, block_rows=block_rows)
        assert blocked == dense
        np.testing.assert_array_equal(blocked.dense, dense.dense)

    def test_auto_stays_dense_below_limit(self, rademacher_spec, seed):
        assert sample_auto(rademacher_spec, seed, need_dense=False).has_dense

    def test_rademacher_support(self, rademacher_spec, seed):
        values = np.unique(sample_matrix(rademacher_spec, seed).dense)
        assert set(values.tolist()) <= {-1.0, 0.0, 1.0}

    def test_empty_mask(self, seed):
        m = sample_matrix(EnsembleSpec(n=4, p=0.0), seed)
        assert m.nnz == 0

    def test_empty_mask_keeps_shift(self, seed):
        m = sample_matrix(EnsembleSpec(n=3, p=0.0, shift=[2.0, 2.0, 2.0]), seed)
        np.testing.assert_array_equal(m.dense, 2.0 * np.eye(3))

    def test_constant_full(self, seed):
        m = sample_matrix(EnsembleSpec(n=3, p=1.0, dist=EntryDistribution.constant(1.0)), seed)
        assert m.nnz == 9
        np.testing.assert_array_equal(m.dense, np.ones((3, 3)))

    def test_zero_diagonal(self, seed):
        spec = EnsembleSpec(n=3, p=1.0, dist=EntryDistribution.constant(1.0), diagonal="zero")
        m = sample_matrix(spec, seed)
        assert m.nnz == 6
        np.testing.assert_array_equal(np.diag(m.dense), 0.0)

    def test_mask_density(self, seed):
        spec = EnsembleSpec(n=400, p=0.1, dist=EntryDistribution.constant(1.0))
        m = sample_matrix(spec, seed)
        band = stats.binom.interval(0.9999, 400 * 400, 0.1)
        assert band[0] <= m.nnz <= band[1]

    @pytest.mark.parametrize("master_seed", [0, 42, 2**64 - 1])
    def test_rademacher_nnz_band(self, master_seed):
        spec = EnsembleSpec(n=100, p=0.1, dist=EntryDistribution.rademacher())
        m = sample_matrix(spec, SeedSpec(master_seed=master_seed))
        assert 859 <= m.nnz <= 1143

    @pytest.mark.parametrize("master_seed", [0, 42, 2**64 - 1])
    def test_directed_er(self, master_seed):
        m = sample_directed_er(50, 0.2, SeedSpec(master_seed=master_seed))
        np.testing.assert_array_equal(np.diag(m.dense), 0.0)
        assert set(np.unique(m.dense).tolist()) <= {0.0, 1.0}
        assert 407 <= m.nnz <= 577

    def test_directed_er_single_vertex(self, seed):
        m = sample_directed_er(1, 0.5, seed)
        np.testing.assert_array_equal(m.dense, np.zeros((1, 1)))

    def test_directed_er_near_complete(self, seed):
        m = sample_directed_er(2, 1.0 - 1e-15, seed)
        np.testing.assert_array_equal(m.dense, [[0.0, 1.0], [1.0, 0.0]])

    def test_mask_and_value_streams_uncorrelated(self):
        mask, value = trial_streams(42, 0)
        u, v = mask.uniforms(0, 10_000), value.uniforms(0, 10_000)
        assert abs(np.corrcoef(u, v)[0, 1]) <= 4.0 / math.sqrt(10_000)

    @pytest.mark.slow
    def test_consecutive_trials_uncorrelated(self):
        spec = EnsembleSpec(n=6, p=0.5, dist=EntryDistribution.rademacher())
        sums = np.array([
            sample_matrix(spec, SeedSpec(master_seed=7, trial_index=t)).dense.sum()
            for t in range(10_001)
        ])
        assert abs(np.corrcoef(sums[:-1], sums[1:])[0, 1]) <= 4.0 / math.sqrt(10_000)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1])
    def test_directed_er_rejects_degenerate_p(self, seed, p):
        with pytest.raises(ParameterError):
            sample_directed_er(10, p, seed)


class TestValidation:

    @pytest.mark.parametrize("spec", [
        EnsembleSpec(n=0, p=0.5),
        EnsembleSpec(n=5, p=1.5),
        EnsembleSpec(n=5, p=-0.1),
        EnsembleSpec(n=5, p=0.5, dist=EntryDistribution.pareto(2.0)),
        EnsembleSpec(n=5, p=0.5, dist=EntryDistribution.bernoulli(1.0)),
        EnsembleSpec(n=5, p=0.5, dist=EntryDistribution(kind="constant")),
        EnsembleSpec(n=3, p=0.5, shift=[1.0, 1.0]),
        EnsembleSpec(n=3, p=0.5, adjacency_mode=True),
    ])
    def test_invalid_specs(self, spec, seed):
        with pytest.raises(ParameterError):
            sample_matrix(spec, seed)


class TestEntryLaws:

    def test_pareto_unit_variance(self):
        draws = sample_entries(EntryDistribution.pareto(4.5), 200000, SeedSpec(master_seed=42))
        assert abs(float(np.mean(draws ** 2)) - 1.0) < 0.05
        assert np.min(np.abs(draws)) >= pareto_scale(4.5)

    def test_pareto_tail(self):
        dist = EntryDistribution.pareto(3.0)
        draws = np.abs(sample_entries(dist, 100000, SeedSpec(master_seed=7)))
        t = 2.0
        expected = tail_probability(dist, t)
        lo, hi = stats.binom.interval(0.9999, draws.size, expected)
        assert lo <= np.count_nonzero(draws >= t) <= hi

    def test_gaussian_moments(self):
        draws = sample_entries(EntryDistribution.gaussian(), 20000, SeedSpec(master_seed=42))
        assert abs(float(np.mean(draws))) < 0.05
        assert abs(float(np.std(draws)) - 1.0) < 0.05

    @pytest.mark.parametrize("dist", [
        EntryDistribution.rademacher(),
        EntryDistribution.gaussian(),
        EntryDistribution.pareto(6.0),
    ])
    def test_million_draw_calibration(self, dist):
        draws = sample_entries(dist, 1_000_000, SeedSpec(master_seed=2024))
        assert abs(float(np.mean(draws))) <= 0.005
        assert abs(float(np.var(draws)) - 1.0) <= 0.01

    def test_bernoulli_mean(self):
        draws = sample_entries(EntryDistribution.bernoulli(0.3), 20000, SeedSpec(master_seed=42))
        assert set(np.unique(draws).tolist()) == {0.0, 1.0}
        assert abs(float(np.mean(draws)) - 0.3) < 0.02


class TestMoments:

    @pytest.mark.parametrize("h", [0.5, 1.0, 3.0, 10.0])
    def test_rademacher(self, h):
        assert abs_moment(EntryDistribution.rademacher(), h) == 1.0

    def test_gaussian_second_and_fourth(self):
        assert abs_moment(EntryDistribution.gaussian(), 2.0) == pytest.approx(1.0, rel=1e-12)
        assert abs_moment(EntryDistribution.gaussian(), 4.0) == pytest.approx(3.0, rel=1e-12)
        assert abs_moment(EntryDistribution.gaussian(), 1.0) == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-12)

    def test_pareto(self):
        dist = EntryDistribution.pareto(4.5)
        assert abs_moment(dist, 2.0) == pytest.approx(1.0, rel=1e-12)
        assert abs_moment(dist, 4.5) == math.inf
        assert abs_moment(dist, 6.0) == math.inf
        assert moment_exponent_ok(dist, 4.0)
        assert not moment_exponent_ok(dist, 6.0)

    def test_order_must_be_positive(self):
        with pytest.raises(DomainError):
            abs_moment(EntryDistribution.gaussian(), 0.0)

    def test_tail_probability(self):
        rademacher = EntryDistribution.rademacher()
        assert tail_probability(rademacher, 0.5) == 1.0
        assert tail_probability(rademacher, 1.0) == 1.0
        assert tail_probability(rademacher, 1.5) == 0.0
        assert tail_probability(EntryDistribution.gaussian(), 0.0) == 1.0
        assert tail_probability(EntryDistribution.gaussian(), 1.96) == pytest.approx(0.05, abs=1e-3)

    def test_psi2(self):
        assert psi2_norm(EntryDistribution.rademacher()) == 1.0
        assert psi2_norm(EntryDistribution.pareto(4.5)) == math.inf
        assert 0.0 < psi2_norm(EntryDistribution.gaussian()) < 2.0

    def test_growth_beta(self):
        assert moment_growth_beta(EntryDistribution.rademacher()) == 0.0
        assert moment_growth_beta(EntryDistribution.pareto(4.5)) == math.inf
        beta = moment_growth_beta(EntryDistribution.gaussian())
        assert 0.0 < beta <= 0.5


class TestTransforms:

    def test_fold(self):
        m = Matrix.from_rows(np.arange(20, dtype=float).reshape(5, 4))
        folded = fold_matrix(m)
        assert (folded.rows, folded.cols) == (2, 4)
        np.testing.assert_array_equal(folded.dense, np.full((2, 4), -8.0))

    def test_fold_sparse_matches_dense(self, rademacher_spec, seed):
        dense = sample_matrix(rademacher_spec, seed)
        sparse_copy = Matrix(csr=dense.sparse_view)
        assert fold_matrix(sparse_copy) == fold_matrix(dense)

    def test_fold_identity(self):
        np.testing.assert_array_equal(
            fold_matrix(Matrix.identity(4)).dense,
            [[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]],
        )

    @pytest.mark.parametrize("n", [2, 5, 6, 11])
    def test_fold_contracts(self, n):
        rng = np.random.default_rng(n)
        a = rng.standard_normal((n, n))
        folded = fold_matrix(Matrix(dense=a)).dense
        for x in rng.standard_normal((10, n)):
            slack = 1e-12 * np.linalg.norm(a) * np.linalg.norm(x)
            assert np.linalg.norm(folded @ x) <= math.sqrt(2.0) * np.linalg.norm(a @ x) + slack

    def test_fold_needs_two_rows(self):
        with pytest.raises(ShapeError):
            fold_matrix(Matrix.from_rows([[1.0, 2.0]]))

    def test_omega_shift(self):
        assert omega_shift(4, 0.25, 2.0) == [2.0] * 4

    def test_zero_rows(self):
        m = Matrix.from_rows([[0.0, 0.0], [1.0, 0.0]])
        assert zero_row_count(m) == 1


class TestPatternCount:

    def test_counts(self):
        m = Matrix.from_rows([
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 1.0],
            [0.5, 0.0, 0.0],
            [-3.0, 0.0, 0.0],
        ])
        assert pattern_count(m, [0], [2]) == 2
        assert pattern_count(m, [0], [2], threshold=0.25) == 3
        assert pattern_count(m, [0, 1], []) == 3

    def test_identity_and_zero(self):
        assert pattern_count(Matrix.identity(3), [0], [1], threshold=1.0) == 1
        assert pattern_count(Matrix(dense=np.zeros((4, 4))), [0, 1], [2]) == 0

    def test_overlap_rejected(self):
        with pytest.raises(ParameterError):
            pattern_count(Matrix.identity(3), [0, 1], [1])

    def test_probability_matches_sampling(self):
        n, p = 400, 0.05
        dist = EntryDistribution.rademacher()
        J, J_prime = [1], list(range(2, 6))
        spec = EnsembleSpec(n=n, p=p, dist=dist, diagonal="zero")
        trials = 50
        total = sum(
            pattern_count(sample_matrix(spec, SeedSpec(master_seed=3, trial_index=t)), J, J_prime)
            for t in range(trials)
        )
        # Rows 1..5 hold a diagonal zero inside J or J'; the other rows follow the closed form.
        expected = (n - 5) * trials * pattern_row_probability(dist, p, len(J), len(J_prime))
        assert abs(total - expected) < 6.0 * math.sqrt(expected) + 10.0
