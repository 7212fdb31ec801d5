import numpy as np
import pytest
from scipy.linalg import sqrtm

from unsharp.errors import ConditioningError, DimensionError, ValidationError
from unsharp.observables import pvm_from_observable, sharp_spin, unsharp_spin, validate_povm
from unsharp.operator_core import is_positive_semidefinite
from unsharp.randmat import random_effect, random_hermitian, random_povm, random_state
from unsharp.simulator import (
    EnsembleConfig,
    exact_step_distributions,
    filter_pass,
    luders_update,
    run_sequences,
    sample_outcomes,
    sequential_measurement,
    stream_rng,
)
from unsharp.states_effects import DensityOperator, born_probability

RHO0 = DensityOperator(np.diag([1.0, 0.0]))
MIXED = DensityOperator.maximally_mixed(2)
Z = sharp_spin([0, 0, 1])
X = sharp_spin([1, 0, 0])
P_PLUS = 0.5 * np.array([[1, 1], [1, 1]])


class TestSampling:
    def test_zero_samples(self):
        rec = sample_outcomes(EnsembleConfig(MIXED, Z, 0, 3))
        assert rec.counts == (0, 0)
        assert list(rec.frequencies) == [0, 0]

    def test_eigenstate(self):
        rec = sample_outcomes(EnsembleConfig(RHO0, pvm_from_observable(np.diag([1.0, -1.0])), 1000, 7))
        assert rec.count("+1") == 1000 and rec.count("-1") == 0

    def test_semitransparent(self):
        M = validate_povm([np.eye(2) / 2, np.eye(2) / 2])
        rec = sample_outcomes(EnsembleConfig(MIXED, M, 100_000, 11))
        assert np.all(np.abs(rec.frequencies - 0.5) <= 5 * np.sqrt(0.25 / 100_000))

    def test_record_fields(self):
        rec = sample_outcomes(EnsembleConfig(MIXED, Z, 400, 1))
        assert rec.samples == 400
        assert rec.frequencies.sum() == pytest.approx(1, abs=1e-12)
        np.testing.assert_allclose(rec.stderr, np.sqrt(rec.frequencies * (1 - rec.frequencies) / 400))
        assert rec.born == (0.5, 0.5)

    def test_deterministic(self, rng):
        cfg = EnsembleConfig(random_state(rng, 3), random_povm(rng, 3, 4), 5000, 2**63 + 12345)
        assert sample_outcomes(cfg).counts == sample_outcomes(cfg).counts
        other = EnsembleConfig(cfg.state, cfg.measure, 5000, 99)
        assert sample_outcomes(other).counts != sample_outcomes(cfg).counts

    def test_streams_independent(self):
        a = stream_rng(5, 0).random(4)
        b = stream_rng(5, 1).random(4)
        assert not np.allclose(a, b)
        np.testing.assert_array_equal(a, stream_rng(5, 0).random(4))

    def test_bad_seed(self):
        with pytest.raises(ValidationError):
            stream_rng(-1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            EnsembleConfig(RHO0, validate_povm([np.eye(3)]), 10)

    def test_frequency_convergence(self, rng):
        N = 100_000
        for k in range(20):
            d = int(rng.integers(2, 5))
            cfg = EnsembleConfig(random_state(rng, d), random_povm(rng, d, int(rng.integers(2, 6))), N, k)
            rec = sample_outcomes(cfg)
            born = np.array(rec.born)
            assert np.all(np.abs(rec.frequencies - born) <= 5 * np.sqrt(born * (1 - born) / N) + 1e-6)

    def test_sum_rule(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 6))
            rho, M = random_state(rng, d), random_povm(rng, d, int(rng.integers(1, 7)))
            assert sum(born_probability(rho, F) for F in M.effects) == pytest.approx(1, abs=1e-9)


class TestLuders:
    def test_projective_filter(self):
        np.testing.assert_allclose(luders_update(MIXED, np.diag([1.0, 0])).matrix, np.diag([1, 0]), atol=1e-15)

    def test_semitransparent_leaves_state(self, rng):
        rho = random_state(rng, 2)
        np.testing.assert_allclose(luders_update(rho, np.eye(2) / 2).matrix, rho.matrix, atol=1e-12)

    def test_rank_one(self):
        # P rho P / Tr(rho P) with P = |+><+|, rho = |0><0| gives |+><+|
        np.testing.assert_allclose(luders_update(RHO0, P_PLUS).matrix, P_PLUS, atol=1e-12)

    def test_zero_probability(self):
        with pytest.raises(ConditioningError):
            luders_update(RHO0, np.diag([0.0, 1.0]))

    def test_projector_fixed_point(self, rng):
        for _ in range(50):
            w, V = np.linalg.eigh(random_hermitian(rng, 4))
            P = V[:, :2] @ V[:, :2].conj().T
            rho = random_state(rng, 4).matrix
            inside = P @ rho @ P
            rho_in = DensityOperator(inside / np.trace(inside).real)
            np.testing.assert_allclose(luders_update(rho_in, P).matrix, rho_in.matrix, atol=1e-12)

    def test_random_valid(self, rng):
        for _ in range(500):
            d = int(rng.integers(2, 6))
            rho, E = random_state(rng, d), random_effect(rng, d)
            if born_probability(rho, E) <= 1e-12:
                continue
            post = luders_update(rho, E)
            assert np.trace(post.matrix).real == pytest.approx(1, abs=1e-9)
            assert is_positive_semidefinite(post.matrix, 1e-9)

    def test_against_scipy_sqrtm(self, rng):
        for _ in range(50):
            rho, E = random_state(rng, 3), random_effect(rng, 3)
            R = sqrtm(E.matrix)
            expected = R @ rho.matrix @ R / np.trace(rho.matrix @ E.matrix).real
            np.testing.assert_allclose(luders_update(rho, E).matrix, expected, atol=1e-9)


class TestFilter:
    def test_always_passes(self):
        g = stream_rng(0)
        for _ in range(100):
            passed, post, g = filter_pass(RHO0, np.diag([1.0, 0]), g)
            assert passed
            np.testing.assert_allclose(post.matrix, RHO0.matrix, atol=1e-15)

    def test_never_passes(self):
        g = stream_rng(0)
        for _ in range(100):
            passed, post, g = filter_pass(RHO0, np.diag([0.0, 1.0]), g)
            assert not passed

    def test_half(self):
        g = stream_rng(4)
        n = 20_000
        hits = 0
        for _ in range(n):
            passed, _, g = filter_pass(MIXED, np.diag([1.0, 0]), g)
            hits += passed
        assert abs(hits / n - 0.5) <= 5 * np.sqrt(0.25 / n)


class TestSequential:
    def test_repeat_on_eigenstate(self):
        t = sequential_measurement(RHO0, [Z, Z], seed=3)
        assert t.labels == ("+1", "+1")
        for s in t.steps:
            np.testing.assert_allclose(s.post_state.matrix, RHO0.matrix, atol=1e-15)

    def test_zxz_disturbance(self):
        stats = run_sequences(RHO0, [Z, X, Z], 10_000, seed=1)
        rec = stats.records[2]
        assert abs(rec.frequencies[rec.labels.index("+1")] - 0.5) <= 0.016
        assert rec.born == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_unsharp_then_sharp(self):
        # oracle: sum over outcomes of sqrt(E) P_z sqrt(E), roots by scipy
        Ex = unsharp_spin([1, 0, 0], 0.5)
        Pz = np.diag([1.0, 0.0])
        heis = sum(sqrtm(E) @ Pz @ sqrtm(E) for E in Ex.effects)
        exact = float(np.real(np.trace(RHO0.matrix @ heis)))
        assert exact == pytest.approx(0.5 + np.sqrt(3) / 4, abs=1e-12)
        assert 0.5 < exact < 1

        marg = exact_step_distributions(RHO0, [Ex, Z])[1]
        assert marg[Z.labels.index("+1")] == pytest.approx(exact, abs=1e-12)

        N = 20_000
        rec = run_sequences(RHO0, [Ex, Z], N, seed=2).records[1]
        f = rec.frequencies[rec.labels.index("+1")]
        assert abs(f - exact) <= 5 * np.sqrt(exact * (1 - exact) / N)

    def test_sharp_repeatability(self, rng):
        M = pvm_from_observable(random_hermitian(rng, 3))
        rho = random_state(rng, 3)
        stats = run_sequences(rho, [M, M], 10_000, seed=8)
        for t in stats.trajectories:
            assert t.labels[0] == t.labels[1]

    def test_workers_do_not_change_results(self, rng):
        rho = random_state(rng, 2)
        measures = [unsharp_spin([1, 0, 0], 0.7), Z, X]
        a = run_sequences(rho, measures, 500, seed=9)
        b = run_sequences(rho, measures, 500, seed=9, workers=4)
        assert [r.counts for r in a.records] == [r.counts for r in b.records]
        assert [t.labels for t in a.trajectories] == [t.labels for t in b.trajectories]

    def test_post_states_valid(self, rng):
        rho = random_state(rng, 3)
        t = sequential_measurement(rho, [random_povm(rng, 3, 3) for _ in range(6)], seed=4)
        assert len(t.steps) == 6 and t.terminated is None
        for s in t.steps:
            assert np.trace(s.post_state.matrix).real == pytest.approx(1, abs=1e-9)

    def test_zero_probability_marker(self):
        class Stub:
            def random(self):
                return 1 - 5e-14

        rho = DensityOperator(np.diag([1 - 1e-13, 1e-13]))
        t = sequential_measurement(rho, [Z, Z], rng=Stub())
        assert t.steps == ()
        assert "zero-probability" in t.terminated
