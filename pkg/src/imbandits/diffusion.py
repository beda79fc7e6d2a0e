"""Independent-cascade simulation with edge semi-bandit feedback, plus exact and
Monte Carlo spread evaluation used as estimators and test oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .network import DirectedNetwork, WeightFunction

EXACT_SPREAD_MAX_ARCS = 20
EXACT_SPREAD_MAX_NODES = 12


class SpreadSizeError(ValueError):
    """Instance too large for exhaustive spread enumeration."""


@dataclass(frozen=True)
class CascadeOutcome:
    """One cascade: activated nodes plus the semi-bandit edge feedback.

    ``observed_arcs`` holds every out-arc of every activated node exactly once;
    ``realizations`` holds the matching 0/1 coin outcomes.
    """

    activated: np.ndarray
    observed_arcs: np.ndarray
    realizations: np.ndarray

    @property
    def activated_set(self) -> frozenset:
        return frozenset(int(v) for v in self.activated)

    @property
    def size(self) -> int:
        return int(self.activated.shape[0])


def _seed_array(net: DirectedNetwork, seeds) -> np.ndarray:
    arr = np.unique(np.asarray(sorted(int(s) for s in seeds), dtype=np.int32))
    if arr.size and (arr[0] < 0 or arr[-1] >= net.n):
        raise ValueError(f"seed id outside [0, {net.n})")
    return arr


def simulate_cascade(net: DirectedNetwork, weights: WeightFunction, seeds, rng) -> CascadeOutcome:
    """Breadth-first IC cascade; each activated node's out-arcs are flipped once."""
    seed_arr = _seed_array(net, seeds)
    activated, observed, realized = _kernels.simulate_cascade(
        net.n, net.out_ptr, net.out_arcs, net.tails, weights.values, seed_arr, rng)
    return CascadeOutcome(activated, observed, realized)


def _realization_bits(m: int) -> np.ndarray:
    """(2^m, m) boolean table: bit e of realization r says arc e is live."""
    r = np.arange(1 << m, dtype=np.uint32)
    return ((r[:, None] >> np.arange(m, dtype=np.uint32)) & 1).astype(bool)


def _realization_probs(bits: np.ndarray, w: np.ndarray) -> np.ndarray:
    prob = np.ones(bits.shape[0])
    for e in range(w.shape[0]):
        prob *= np.where(bits[:, e], w[e], 1.0 - w[e])
    return prob


def exact_spread(net: DirectedNetwork, weights: WeightFunction, seeds) -> float:
    """Exact expected cascade size by enumerating all 2^m edge realizations."""
    if net.m > EXACT_SPREAD_MAX_ARCS:
        raise SpreadSizeError(f"exact spread caps at m={EXACT_SPREAD_MAX_ARCS}, got {net.m}")
    seed_arr = _seed_array(net, seeds)
    if seed_arr.size == 0:
        return 0.0
    # Restrict propagation to arc-incident nodes; isolated seeds each add 1.
    incident = np.unique(np.concatenate([net.heads, net.tails])).astype(np.int64)
    node_pos = {int(v): i for i, v in enumerate(incident)}
    inside = [node_pos[int(s)] for s in seed_arr if int(s) in node_pos]
    isolated = seed_arr.size - len(inside)
    if not inside:
        return float(isolated)

    bits = _realization_bits(net.m)
    prob = _realization_probs(bits, weights.values)
    active = np.zeros((bits.shape[0], incident.shape[0]), dtype=bool)
    active[:, inside] = True
    changed = True
    while changed:
        changed = False
        for e in range(net.m):
            h = node_pos[int(net.heads[e])]
            t = node_pos[int(net.tails[e])]
            upd = bits[:, e] & active[:, h] & ~active[:, t]
            if upd.any():
                active[upd, t] = True
                changed = True
    return float(prob @ active.sum(axis=1)) + float(isolated)


def exact_spread_all_subsets(net: DirectedNetwork, weights: WeightFunction) -> np.ndarray:
    """Exact spread for every seed set, indexed by node bitmask.

    Works from reverse closures: ``f[S] = sum_v P(some node reaching v is in S)``,
    aggregated over realizations into per-mask weights and finished with a
    sum-over-subsets transform.  Memory stays O(2^m + 2^n).
    """
    if net.n > EXACT_SPREAD_MAX_NODES:
        raise SpreadSizeError(f"all-subset spread caps at n={EXACT_SPREAD_MAX_NODES}, got {net.n}")
    if net.m > EXACT_SPREAD_MAX_ARCS:
        raise SpreadSizeError(f"exact spread caps at m={EXACT_SPREAD_MAX_ARCS}, got {net.m}")
    n, m = net.n, net.m
    bits = _realization_bits(m)
    prob = _realization_probs(bits, weights.values)

    # reach_to[r, v]: bitmask of nodes with a live path to v (including v).
    reach_to = np.broadcast_to(
        np.uint32(1) << np.arange(n, dtype=np.uint32), (bits.shape[0], n)).copy()
    changed = True
    while changed:
        changed = False
        for e in range(m):
            h, t = int(net.heads[e]), int(net.tails[e])
            merged = reach_to[:, t] | np.where(bits[:, e], reach_to[:, h], np.uint32(0))
            if np.any(merged != reach_to[:, t]):
                reach_to[:, t] = merged
                changed = True

    mass = np.zeros(1 << n)
    for v in range(n):
        mass += np.bincount(reach_to[:, v], weights=prob, minlength=1 << n)
    # sos[T] = total mass of reach-masks contained in T
    sos = mass.copy()
    universe = np.arange(1 << n)
    for i in range(n):
        has = (universe >> i) & 1 == 1
        sos[has] += sos[universe[has] ^ (1 << i)]
    full = (1 << n) - 1
    return mass.sum() - sos[full ^ universe]


def monte_carlo_spread(net: DirectedNetwork, weights: WeightFunction, seeds,
                       n_sims: int, rng) -> tuple[float, float]:
    """Sample mean and standard error of the cascade size over ``n_sims`` runs."""
    if n_sims < 1:
        raise ValueError("n_sims must be at least 1")
    seed_arr = _seed_array(net, seeds)
    sizes = np.empty(n_sims)
    for i in range(n_sims):
        activated, _, _ = _kernels.simulate_cascade(
            net.n, net.out_ptr, net.out_arcs, net.tails, weights.values, seed_arr, rng)
        sizes[i] = activated.shape[0]
    est = float(sizes.mean())
    stderr = float(sizes.std(ddof=1) / math.sqrt(n_sims)) if n_sims > 1 else 0.0
    return est, stderr
