import math

import mpmath
import numpy as np
import pytest

from imbandits.learners import (CumulativeOversampling, Cucb, LinearThompson,
                                LinearUcb, RidgeState, exploration_radii,
                                make_learner, regret_bound_constant,
                                ridge_update, weighted_inv_norm)
from imbandits.network import EdgeFeatureTable

mpmath.mp.dps = 50


def _mp_radii(t, d, m, D, v):
    t, d, m, D, v = map(mpmath.mpf, (t, d, m, D, v))
    alpha = mpmath.sqrt(d * mpmath.log(1 + t * m / d) + 4 * mpmath.log(t)) + D
    beta = v * alpha * (mpmath.sqrt(2 * mpmath.log(2 * t))
                        + mpmath.sqrt(2 * mpmath.log(m) + 4 * mpmath.log(t)))
    return alpha, beta


class TestRadii:
    def test_minimal_reference_values(self):
        alpha, beta = exploration_radii(1, 1, 1, 0.0, 1.0)
        assert alpha == pytest.approx(0.8325546111576977, rel=1e-12)
        assert beta == pytest.approx(0.9802581434685472, rel=1e-12)

    def test_reference_network_alpha(self):
        alpha, _ = exploration_radii(1, 10, 319, 1.0, 1.0)
        ref, _ = _mp_radii(1, 10, 319, 1, 1)
        assert alpha == pytest.approx(float(ref), rel=1e-12)
        assert alpha == pytest.approx(6.9106, abs=5e-5)

    def test_v_zero_kills_beta(self):
        for t in (1, 5, 50):
            assert exploration_radii(t, 3, 7, 1.0, 0.0)[1] == 0.0

    def test_strictly_increasing_in_t(self):
        alphas, betas = zip(*(exploration_radii(t, 4, 9, 1.0, 0.5)
                              for t in range(1, 40)))
        assert all(a2 > a1 for a1, a2 in zip(alphas, alphas[1:]))
        assert all(b2 > b1 for b1, b2 in zip(betas, betas[1:]))

    def test_round_index_starts_at_one(self):
        with pytest.raises(ValueError):
            exploration_radii(0, 1, 1, 1.0, 1.0)


class TestRidgeState:
    def test_single_observation_closed_form(self):
        s = RidgeState(2)
        s.update(np.array([[1.0, 0.0]]), np.array([1.0]))
        assert np.allclose(s.M, np.diag([2.0, 1.0]))
        assert np.allclose(s.bvec, [1.0, 0.0])
        assert np.allclose(s.theta, [0.5, 0.0])

    def test_two_observations_closed_form(self):
        s = RidgeState(2)
        s.update(np.array([[1.0, 0.0], [1.0, 0.0]]), np.array([1.0, 0.0]))
        assert np.allclose(s.M, np.diag([3.0, 1.0]))
        assert np.allclose(s.theta, [1 / 3, 0.0])

    def test_empty_update_is_noop(self):
        s = RidgeState(3)
        before = s.M.copy()
        s.update(np.zeros((0, 3)), np.zeros(0))
        assert np.array_equal(s.M, before)

    def test_ridge_update_helper(self):
        s = ridge_update(RidgeState(2), [(np.array([1.0, 0.0]), 1.0)])
        assert np.allclose(s.theta, [0.5, 0.0])

    def test_rebuild_from_log(self):
        rng = np.random.default_rng(0)
        d = 4
        s = RidgeState(d)
        log = []
        for _ in range(30):
            k = int(rng.integers(0, 5))
            xs = rng.normal(size=(k, d))
            ys = rng.integers(0, 2, k).astype(float)
            s.update(xs, ys)
            log.append((xs, ys))
        M = np.eye(d) + sum(xs.T @ xs for xs, _ in log)
        b = sum(xs.T @ ys for xs, ys in log)
        assert np.allclose(s.M, M, atol=1e-10)
        assert np.linalg.norm(s.theta - np.linalg.solve(M, b)) <= 1e-8 * (1 + np.linalg.norm(b))


class TestWeightedNorm:
    def test_identity(self):
        assert weighted_inv_norm(np.eye(3), np.array([0.0, 1.0, 0.0])) == 1.0

    def test_diagonal(self):
        assert weighted_inv_norm(np.diag([4.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(0.5)

    def test_zero_vector(self):
        assert weighted_inv_norm(np.eye(2), np.zeros(2)) == 0.0


def _features(rng, m=8, d=3, nonneg=False):
    mat = rng.normal(size=(m, d))
    if nonneg:
        mat = np.abs(mat)
    return EdgeFeatureTable(mat)


class TestCumulativeOversampling:
    def test_first_round_is_pure_sample(self):
        rng = np.random.default_rng(1)
        feats = _features(rng)
        co = CumulativeOversampling(feats, v=1.0, theta_bound=1.0)
        sample_rng = np.random.default_rng(7)
        u = co.weights(1, sample_rng)
        # replicate the draw: same z, same geometry
        alpha, _ = exploration_radii(1, co.d, co.m, 1.0, 1.0)
        z = np.random.default_rng(7).standard_normal(co.d)
        theta_tilde = alpha * np.linalg.solve(np.eye(co.d), z)  # M = I before updates
        expect = np.clip(feats.matrix @ theta_tilde, 0.0, 1.0)
        assert np.allclose(u, expect, atol=1e-12)

    def test_matches_linear_thompson_at_round_one(self):
        rng = np.random.default_rng(2)
        feats = _features(rng)
        co = CumulativeOversampling(feats, v=0.7, theta_bound=0.5)
        ts = LinearThompson(feats, v=0.7, theta_bound=0.5)
        obs = (np.array([0, 2, 3]), np.array([1.0, 0.0, 1.0]))
        co.update(*obs)
        ts.update(*obs)
        u_co = co.weights(1, np.random.default_rng(5))
        u_ts = ts.weights(1, np.random.default_rng(5))
        assert np.array_equal(u_co, u_ts)

    def test_sigma_finite_after_round_one(self):
        rng = np.random.default_rng(3)
        co = CumulativeOversampling(_features(rng), v=1.0, theta_bound=1.0)
        assert np.all(np.isneginf(co.sigma))
        co.weights(1, rng)
        assert np.all(np.isfinite(co.sigma))

    def test_zero_feature_arc_pinned_to_mean(self):
        feats = EdgeFeatureTable(np.array([[0.0, 0.0], [1.0, 0.0]]))
        co = CumulativeOversampling(feats, v=1.0, theta_bound=1.0)
        rng = np.random.default_rng(4)
        for t in (1, 2, 3):
            u = co.weights(t, rng)
            assert u[0] == 0.0
            assert co.sigma[0] == 0.0

    def test_projection_is_idempotent(self):
        rng = np.random.default_rng(5)
        co = CumulativeOversampling(_features(rng), v=3.0, theta_bound=1.0)
        u = co.weights(1, rng)
        assert np.array_equal(np.clip(u, 0.0, 1.0), u)
        assert u.min() >= 0.0 and u.max() <= 1.0

    def test_running_maximum_only_grows_in_scaled_units(self):
        rng = np.random.default_rng(6)
        co = CumulativeOversampling(_features(rng), v=1.0, theta_bound=1.0)
        co.weights(1, rng)
        prev = co.sigma.copy()
        for t in range(2, 8):
            co.weights(t, rng)
            assert np.all(co.sigma >= prev - 1e-12)
            prev = co.sigma.copy()

    def test_optimism_probability_halves_each_round(self):
        rng = np.random.default_rng(8)
        feats = _features(rng, m=5, d=2, nonneg=True)
        snapshots = [RidgeState(2)]
        hist = np.random.default_rng(9)
        for _ in range(3):
            s = snapshots[-1].copy()
            s.update(np.abs(hist.normal(size=(4, 2))), hist.integers(0, 2, 4).astype(float))
            snapshots.append(s)
        replays = 4000
        below = np.zeros(3)
        draw = np.random.default_rng(10)
        for _ in range(replays):
            co = CumulativeOversampling(feats, v=1.0, theta_bound=1.0)
            for t in (1, 2, 3):
                co.state = snapshots[t - 1]
                co.weights(t, draw)
                below[t - 1] += co.sigma[0] <= 0
        freq = below / replays
        for t in (1, 2, 3):
            p = 0.5 ** t
            assert abs(freq[t - 1] - p) <= 4 * math.sqrt(p * (1 - p) / replays)

    def test_snapshot_roundtrip(self, tmp_path):
        rng = np.random.default_rng(11)
        feats = _features(rng)
        co = CumulativeOversampling(feats, v=0.3, theta_bound=2.0)
        co.update(np.array([1, 4]), np.array([1.0, 0.0]))
        co.weights(1, rng)
        co.weights(2, rng)
        path = tmp_path / "state.txt"
        co.save_snapshot(path, t=2)
        again, t = CumulativeOversampling.load_snapshot(path, feats, v=0.3, theta_bound=2.0)
        assert t == 2
        assert np.array_equal(again.state.M, co.state.M)
        assert np.array_equal(again.state.bvec, co.state.bvec)
        assert np.array_equal(again.sigma, co.sigma)
        r1, r2 = np.random.default_rng(0), np.random.default_rng(0)
        assert np.array_equal(co.weights(3, r1), again.weights(3, r2))


class TestSampling:
    def test_sample_covariance_matches_target(self):
        rng = np.random.default_rng(12)
        feats = _features(rng, m=4, d=3)
        learner = LinearThompson(feats, v=0.8, theta_bound=1.0)
        learner.update(np.array([0, 1, 2, 3] * 5), np.ones(20))
        alpha, L, _, _ = learner._round_geometry(4)
        draws = np.stack([learner._sample_theta(alpha, L, rng) for _ in range(40000)])
        target = (0.8 * alpha) ** 2 * np.linalg.inv(learner.state.M)
        sample_cov = np.cov(draws.T)
        assert np.allclose(sample_cov, target, atol=0.05 * np.abs(target).max())
        assert np.allclose(draws.mean(axis=0), learner.state.theta, atol=0.05)


class TestBaselines:
    def test_lin_ucb_saturates_with_fresh_state(self):
        feats = EdgeFeatureTable(np.array([[1.0, 0.0]]))
        ucb = LinearUcb(feats, v=1.0, theta_bound=1.0)
        u = ucb.weights(1, np.random.default_rng(0))
        assert u[0] == 1.0  # alpha ~ 1.8 >= 1 with theta = 0, |x| = 1

    def test_lin_ts_degenerate_when_v_zero(self):
        rng = np.random.default_rng(13)
        feats = _features(rng)
        ts = LinearThompson(feats, v=0.0, theta_bound=1.0)
        ts.update(np.arange(feats.arc_count), rng.integers(0, 2, feats.arc_count).astype(float))
        expect = np.clip(feats.matrix @ ts.state.theta, 0.0, 1.0)
        assert np.allclose(ts.weights(3, rng), expect, atol=1e-15)

    def test_cucb_unobserved_arcs_are_optimistic(self):
        cucb = Cucb(4)
        assert np.all(cucb.weights(1, None) == 1.0)

    def test_cucb_radius_formula(self):
        cucb = Cucb(2)
        cucb.update(np.array([0, 0, 0, 0]), np.array([1, 0, 1, 0]))
        u = cucb.weights(10, None)
        expect = min(1.0, 0.5 + math.sqrt(3 * math.log(10) / (2 * 4)))
        assert u[0] == pytest.approx(expect)
        assert u[1] == 1.0

    def test_factory_dispatch(self):
        rng = np.random.default_rng(14)
        feats = _features(rng)
        for kind, cls in (("co", CumulativeOversampling), ("lin-ts", LinearThompson),
                          ("lin-ucb", LinearUcb), ("cucb", Cucb)):
            assert isinstance(make_learner(kind, feats), cls)
        with pytest.raises(ValueError):
            make_learner("epsilon-greedy", feats)


class TestRegretBoundConstant:
    def test_matches_high_precision_evaluation(self):
        got = regret_bound_constant(25, 319, 10, 5000, 1.0, 1.0)
        n, m, d, T, v, D = map(mpmath.mpf, (25, 319, 10, 5000, 1, 1))
        eta = 1 - mpmath.exp(-1)
        alpha, beta = _mp_radii(T, d, m, D, v)
        lead = (alpha + beta) * n * m / eta * mpmath.sqrt(
            d * T * mpmath.log(1 + m * T / d) / mpmath.log(2))
        tail = n * (4 * m * mpmath.sqrt(mpmath.pi) * mpmath.exp(1 / (2 * v * v)) / v
                    + mpmath.pi ** 2 / 3)
        assert got == pytest.approx(float(lead + tail), rel=1e-6)

    def test_monotone_in_horizon(self):
        values = [regret_bound_constant(10, 30, 5, T, 1.0, 1.0) for T in (10, 100, 1000)]
        assert values[0] < values[1] < values[2]

    def test_small_v_blows_up_constant_term(self):
        # below v ~ 0.25 the e^{1/2v^2}/v term dominates everything else
        values = [regret_bound_constant(10, 30, 5, 100, v, 1.0)
                  for v in (0.25, 0.15, 0.1, 0.05)]
        assert values[0] < values[1] < values[2] < values[3]

    def test_v_zero_rejected(self):
        with pytest.raises(ValueError, match="diverges"):
            regret_bound_constant(10, 30, 5, 100, 0.0, 1.0)
