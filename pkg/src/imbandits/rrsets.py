"""Reverse-reachable-set collections and coverage-based spread estimation,
with the concave-error-interval sample-size rule and width-adaptive growth."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .network import DirectedNetwork, WeightFunction


class CeiPreconditionError(ValueError):
    """Accuracy parameter violates the eps <= 3/sqrt(n) requirement."""


class FingerprintMismatchError(ValueError):
    """Collection was sampled under different edge weights than the evaluation."""


@dataclass(frozen=True)
class CeiParams:
    """Sample-size inputs: failure exponent, accuracy, per-round budget, max node cost.

    ``allow_loose_eps`` drops the eps <= 3/sqrt(n) check (and with it the
    estimation guarantee); it exists because the guaranteed sizes are
    impractical on large networks.
    """

    l: float
    eps: float
    budget: float
    max_cost: float
    allow_loose_eps: bool = False

    def __post_init__(self):
        if self.l <= 0:
            raise ValueError("failure exponent l must be positive")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.max_cost <= 0:
            raise ValueError("max cost must be positive")

    def check_eps(self, n: int) -> None:
        limit = 3.0 / math.sqrt(n)
        if not self.allow_loose_eps and self.eps > limit * (1 + 1e-12):
            raise CeiPreconditionError(
                f"eps={self.eps} exceeds 3/sqrt(n)={limit:.6g}; "
                "set allow_loose_eps to drop the guarantee")


def cei_sample_size(n: int, params: CeiParams, opt_lower: float) -> int:
    """Number of RR sets that keeps every seed set inside its error interval.

    ``opt_lower`` is a positive lower bound on the optimal budgeted spread.
    Natural logs throughout.
    """
    params.check_eps(n)
    if opt_lower <= 0:
        raise ValueError("opt_lower must be positive")
    raw = 7.0 * n * (params.l * math.log(n) + n * math.log(2.0))
    return int(math.ceil(raw / (opt_lower * params.eps ** 2)))


class RRCollection:
    """Sampled RR sets with an inverted node -> set-index lookup.

    ``total_width`` counts the coin flips spent across all sets; the average
    width estimates the expected per-set coin tosses that drives the adaptive
    size rule.  The fingerprint pins the weights the sets were sampled under.
    """

    def __init__(self, n: int, flat_nodes: np.ndarray, offsets: np.ndarray,
                 total_width: int, fingerprint: str):
        self.n = int(n)
        self.count = int(offsets.shape[0] - 1)
        if self.count <= 0:
            raise ValueError("collection needs at least one RR set")
        self.flat_nodes = np.ascontiguousarray(flat_nodes, dtype=np.int32)
        self.offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        self.total_width = int(total_width)
        self.fingerprint = fingerprint

        sizes = np.diff(self.offsets)
        if sizes.min() < 1:
            raise ValueError("every RR set must contain at least its root")
        self.set_of_entry = np.repeat(
            np.arange(self.count, dtype=np.int32), sizes).astype(np.int32)
        order = np.argsort(self.flat_nodes, kind="stable")
        self.inv_sets = self.set_of_entry[order]
        self.inv_ptr = np.zeros(self.n + 1, dtype=np.int64)
        self.inv_ptr[1:] = np.cumsum(np.bincount(self.flat_nodes, minlength=self.n))
        for a in (self.flat_nodes, self.offsets, self.set_of_entry, self.inv_sets, self.inv_ptr):
            a.setflags(write=False)

    def sets(self) -> list[frozenset]:
        return [frozenset(self.flat_nodes[self.offsets[i]:self.offsets[i + 1]].tolist())
                for i in range(self.count)]

    def sets_containing(self, v: int) -> np.ndarray:
        return self.inv_sets[self.inv_ptr[v]:self.inv_ptr[v + 1]]

    def covered_mask(self, seeds) -> np.ndarray:
        mask = np.zeros(self.count, dtype=bool)
        for v in seeds:
            mask[self.sets_containing(int(v))] = True
        return mask

    def coverage_fraction(self, seeds) -> float:
        return float(self.covered_mask(seeds).sum()) / self.count

    def marginal_coverage(self, covered_mask: np.ndarray, v: int) -> int:
        """Not-yet-covered sets that contain ``v``."""
        return int(np.count_nonzero(~covered_mask[self.sets_containing(int(v))]))

    def marginal_counts(self, covered_mask: np.ndarray) -> np.ndarray:
        """Per-node uncovered membership counts, for greedy selection."""
        live = ~covered_mask[self.set_of_entry]
        return np.bincount(self.flat_nodes[live], minlength=self.n)

    def spread_estimate(self, seeds, weights: WeightFunction) -> float:
        """n * coverage fraction, refusing weights the sets were not built under."""
        if weights.fingerprint != self.fingerprint:
            raise FingerprintMismatchError(
                "RR collection was sampled under different edge weights")
        return self.n * self.coverage_fraction(seeds)


def sample_rr_set(net: DirectedNetwork, weights: WeightFunction, rng) -> tuple[np.ndarray, int]:
    """One RR set (uniform root, reverse BFS) and its width in coin flips."""
    if net.n <= 0:
        raise ValueError("cannot sample an RR set from an empty graph")
    flat, offsets, width = _kernels.sample_rr_sets(
        net.n, net.in_ptr, net.in_arcs, net.heads, weights.values, 1, rng)
    return flat, int(width)


def sample_collection(net: DirectedNetwork, weights: WeightFunction, count: int, rng) -> RRCollection:
    """Collection of exactly ``count`` RR sets."""
    if net.n <= 0:
        raise ValueError("cannot sample RR sets from an empty graph")
    if count < 1:
        raise ValueError("count must be at least 1")
    flat, offsets, width = _kernels.sample_rr_sets(
        net.n, net.in_ptr, net.in_arcs, net.heads, weights.values, count, rng)
    return RRCollection(net.n, flat, offsets, width, weights.fingerprint)


def build_collection(net: DirectedNetwork, weights: WeightFunction,
                     params: CeiParams, rng) -> RRCollection:
    """Width-adaptive collection growth.

    Opens at the size the ``opt_lower = n`` rule prescribes (the standard
    opening choice; loose when the budget cannot afford even the cheapest
    node), then repeatedly re-derives the target from the running average
    width and tops the collection up until the count meets it.
    """
    if net.n <= 0:
        raise ValueError("cannot sample RR sets from an empty graph")
    params.check_eps(net.n)
    n, m = net.n, net.m
    count = cei_sample_size(n, params, opt_lower=float(n))
    flat, offsets, width = _kernels.sample_rr_sets(
        net.n, net.in_ptr, net.in_arcs, net.heads, weights.values, count, rng)
    parts_flat = [flat]
    parts_off = [offsets]
    total_width = int(width)
    numer = 7.0 * m * (params.l * math.log(n) + n * math.log(2.0)) \
        * min(params.budget / params.max_cost, 1.0)
    for _ in range(64):
        if total_width == 0:
            break  # no sampled root had in-arcs; the width rule degenerates
        ept = total_width / count
        target = int(math.ceil(numer / (ept * params.eps ** 2)))
        if count >= target:
            break
        deficit = target - count
        flat, offsets, width = _kernels.sample_rr_sets(
            net.n, net.in_ptr, net.in_arcs, net.heads, weights.values, deficit, rng)
        parts_flat.append(flat)
        parts_off.append(offsets[1:] + parts_off[-1][-1])
        total_width += int(width)
        count += deficit
    flat_all = np.concatenate(parts_flat)
    off_all = np.concatenate(parts_off)
    return RRCollection(n, flat_all, off_all, total_width, weights.fingerprint)
