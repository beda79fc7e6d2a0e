"""Online edge-weight estimators sharing ridge-regression state: cumulative
oversampling, linear Thompson sampling, linear UCB, and the CUCB baseline."""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_triangular

from .network import EdgeFeatureTable


def exploration_radii(t: int, d: int, m: int, theta_bound: float, v: float) -> tuple[float, float]:
    """Confidence radius for the ridge estimate and for the oversampled estimate.

    alpha = sqrt(d ln(1 + t m / d) + 4 ln t) + theta_bound
    beta  = v alpha (sqrt(2 ln 2t) + sqrt(2 ln m + 4 ln t))
    """
    if t < 1:
        raise ValueError("round index starts at 1")
    alpha = math.sqrt(d * math.log(1.0 + t * m / d) + 4.0 * math.log(t)) + theta_bound
    beta = v * alpha * (math.sqrt(2.0 * math.log(2.0 * t))
                        + math.sqrt(2.0 * math.log(m) + 4.0 * math.log(t)))
    return alpha, beta


def weighted_inv_norm(M: np.ndarray, x: np.ndarray) -> float:
    """sqrt(x^T M^{-1} x) via a triangular solve (no explicit inverse)."""
    L = np.linalg.cholesky(M)
    z = solve_triangular(L, x, lower=True)
    return float(np.linalg.norm(z))


class RidgeState:
    """Regularized least-squares accumulator: M = I + sum x x^T, b = sum x y, theta = M^{-1} b."""

    def __init__(self, d: int):
        self.d = d
        self.M = np.eye(d)
        self.bvec = np.zeros(d)
        self.theta = np.zeros(d)

    def update(self, xs: np.ndarray, ys: np.ndarray) -> None:
        xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
        ys = np.asarray(ys, dtype=np.float64).ravel()
        if xs.shape[0] == 0:
            return
        if xs.shape[1] != self.d:
            raise ValueError(f"feature dimension {xs.shape[1]} != {self.d}")
        self.M += xs.T @ xs
        self.bvec += xs.T @ ys
        self.theta = np.linalg.solve(self.M, self.bvec)

    def copy(self) -> "RidgeState":
        fresh = RidgeState(self.d)
        fresh.M = self.M.copy()
        fresh.bvec = self.bvec.copy()
        fresh.theta = self.theta.copy()
        return fresh


def ridge_update(state: RidgeState, observations) -> RidgeState:
    """Fold ``(x, y)`` pairs into the state (mutates and returns it)."""
    if observations:
        xs = np.stack([x for x, _ in observations])
        ys = np.array([y for _, y in observations], dtype=np.float64)
        state.update(xs, ys)
    return state


class _LinearLearner:
    """Shared ridge state and feedback plumbing for the linear learners."""

    def __init__(self, features: EdgeFeatureTable, v: float = 1.0, theta_bound: float = 1.0):
        self.X = features.matrix
        self.m, self.d = self.X.shape
        self.v = float(v)
        self.theta_bound = float(theta_bound)
        self.state = RidgeState(self.d)

    def update(self, observed_arcs, realizations) -> None:
        arcs = np.asarray(observed_arcs, dtype=np.int64)
        if arcs.size == 0:
            return
        self.state.update(self.X[arcs], np.asarray(realizations, dtype=np.float64))

    def _round_geometry(self, t: int):
        """alpha_t, Cholesky factor of M, mean predictions, per-arc M^{-1} norms."""
        alpha, _ = exploration_radii(t, self.d, self.m, self.theta_bound, self.v)
        L = np.linalg.cholesky(self.state.M)
        mean = self.X @ self.state.theta
        norms = np.linalg.norm(solve_triangular(L, self.X.T, lower=True), axis=0)
        return alpha, L, mean, norms

    def _sample_theta(self, alpha: float, L: np.ndarray, rng) -> np.ndarray:
        # L L^T = M, so L^{-T} z has covariance M^{-1}.
        z = rng.standard_normal(self.d)
        return self.state.theta + self.v * alpha * solve_triangular(L.T, z, lower=False)


class CumulativeOversampling(_LinearLearner):
    """One posterior-style sample per round, carried forward as a per-edge
    running maximum of scaled deviations so the estimate turns optimistic."""

    kind = "co"

    def __init__(self, features, v=1.0, theta_bound=1.0):
        super().__init__(features, v, theta_bound)
        self.sigma = np.full(self.m, -np.inf)

    def reset_samples(self) -> None:
        self.sigma = np.full(self.m, -np.inf)

    def weights(self, t: int, rng) -> np.ndarray:
        alpha, L, mean, norms = self._round_geometry(t)
        fresh = self.X @ self._sample_theta(alpha, L, rng)
        with np.errstate(invalid="ignore", divide="ignore"):
            carried = mean + self.sigma * (alpha * norms)
            w = np.maximum(fresh, carried)
            # zero-feature arcs carry no information; pin them to the mean
            w = np.where(norms > 0, w, mean)
            self.sigma = np.where(norms > 0, (w - mean) / (alpha * norms), 0.0)
        return np.clip(w, 0.0, 1.0)

    def save_snapshot(self, path, t: int) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"t {t}\n")
            fh.write("M " + " ".join(repr(float(x)) for x in self.state.M.ravel()) + "\n")
            fh.write("B " + " ".join(repr(float(x)) for x in self.state.bvec) + "\n")
            fh.write("sigma " + " ".join(repr(float(x)) for x in self.sigma) + "\n")

    @classmethod
    def load_snapshot(cls, path, features, v=1.0, theta_bound=1.0):
        fields = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                key, _, rest = line.partition(" ")
                fields[key] = rest.split()
        learner = cls(features, v, theta_bound)
        t = int(fields["t"][0])
        learner.state.M = np.array([float(x) for x in fields["M"]]).reshape(learner.d, learner.d)
        learner.state.bvec = np.array([float(x) for x in fields["B"]])
        learner.state.theta = np.linalg.solve(learner.state.M, learner.state.bvec)
        learner.sigma = np.array([float(x) for x in fields["sigma"]])
        return learner, t


class LinearThompson(_LinearLearner):
    """Plain linear Thompson sampling from the oversampled ellipsoid."""

    kind = "lin-ts"

    def weights(self, t: int, rng) -> np.ndarray:
        alpha, L, _, _ = self._round_geometry(t)
        return np.clip(self.X @ self._sample_theta(alpha, L, rng), 0.0, 1.0)


class LinearUcb(_LinearLearner):
    """Deterministic upper confidence bounds on the linear weights."""

    kind = "lin-ucb"

    def weights(self, t: int, rng) -> np.ndarray:
        alpha, _, mean, norms = self._round_geometry(t)
        return np.clip(mean + alpha * norms, 0.0, 1.0)


class Cucb:
    """Per-edge UCB with no generalization; unobserved edges stay at 1."""

    kind = "cucb"

    def __init__(self, m: int):
        self.m = m
        self.pulls = np.zeros(m, dtype=np.int64)
        self.wins = np.zeros(m, dtype=np.int64)

    def update(self, observed_arcs, realizations) -> None:
        arcs = np.asarray(observed_arcs, dtype=np.int64)
        if arcs.size == 0:
            return
        np.add.at(self.pulls, arcs, 1)
        np.add.at(self.wins, arcs, np.asarray(realizations, dtype=np.int64))

    def weights(self, t: int, rng) -> np.ndarray:
        u = np.ones(self.m)
        seen = self.pulls > 0
        if seen.any():
            rate = self.wins[seen] / self.pulls[seen]
            radius = np.sqrt(3.0 * math.log(t) / (2.0 * self.pulls[seen]))
            u[seen] = np.clip(rate + radius, 0.0, 1.0)
        return u


LEARNER_KINDS = ("co", "lin-ts", "lin-ucb", "cucb")


def make_learner(kind: str, features: EdgeFeatureTable, v: float = 1.0,
                 theta_bound: float = 1.0):
    if kind == "co":
        return CumulativeOversampling(features, v, theta_bound)
    if kind == "lin-ts":
        return LinearThompson(features, v, theta_bound)
    if kind == "lin-ucb":
        return LinearUcb(features, v, theta_bound)
    if kind == "cucb":
        return Cucb(features.arc_count)
    raise ValueError(f"unknown learner kind {kind!r}; expected one of {LEARNER_KINDS}")


def regret_bound_constant(n: int, m: int, d: int, T: int, v: float,
                          theta_bound: float, eta: float = 1.0 - 1.0 / math.e) -> float:
    """Closed-form horizon-T scaled-regret bound for the oversampling learner."""
    if min(n, m, d, T) <= 0 or eta <= 0 or theta_bound < 0:
        raise ValueError("n, m, d, T, eta must be positive")
    if v <= 0:
        raise ValueError("the bound diverges as v -> 0; v must be positive")
    alpha, beta = exploration_radii(T, d, m, theta_bound, v)
    lead = (alpha + beta) * n * m / eta * math.sqrt(
        d * T * math.log(1.0 + m * T / d) / math.log(2.0))
    tail = n * (4.0 * m * math.sqrt(math.pi) * math.exp(1.0 / (2.0 * v * v)) / v
                + math.pi ** 2 / 3.0)
    return lead + tail
