"""Directed-network representation, cost/feature ingestion, and ground-truth weights."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class NetworkLoadError(ValueError):
    """Malformed network input: bad line, self-loop, duplicate arc, or bad cost."""


class WeightRangeError(ValueError):
    """Linear weights fell outside [0, 1] and clamping was not requested."""

    def __init__(self, arcs, values):
        self.arcs = list(arcs)
        self.values = list(values)
        shown = ", ".join(f"arc {a}: {v:.6g}" for a, v in zip(self.arcs[:10], self.values))
        more = "" if len(self.arcs) <= 10 else f" (+{len(self.arcs) - 10} more)"
        super().__init__(f"{len(self.arcs)} linear weights outside [0, 1]: {shown}{more}")


class DirectedNetwork:
    """Immutable directed graph with per-node seeding costs.

    Arc ids are assigned in input order.  Adjacency is kept in CSR form
    (``out_ptr``/``out_arcs`` by source node, ``in_ptr``/``in_arcs`` by target
    node) with arc ids ascending inside each node's slice, so traversal order
    is the input order.
    """

    def __init__(self, n: int, arc_pairs, costs=None):
        if n <= 0:
            raise NetworkLoadError("network needs at least one node")
        heads = np.asarray([p[0] for p in arc_pairs], dtype=np.int32)
        tails = np.asarray([p[1] for p in arc_pairs], dtype=np.int32)
        m = heads.shape[0]
        if m == 0:
            heads = heads.reshape(0)
            tails = tails.reshape(0)
        if m and (heads.min() < 0 or tails.min() < 0 or heads.max() >= n or tails.max() >= n):
            raise NetworkLoadError("arc endpoint outside [0, n)")
        if np.any(heads == tails):
            bad = int(np.flatnonzero(heads == tails)[0])
            raise NetworkLoadError(f"self-loop at arc {bad} ({heads[bad]} -> {tails[bad]})")
        keys = heads.astype(np.int64) * n + tails
        if np.unique(keys).shape[0] != m:
            raise NetworkLoadError("duplicate arc in input")

        if costs is None:
            costs = np.ones(n, dtype=np.float64)
        else:
            costs = np.asarray(costs, dtype=np.float64)
            if costs.shape != (n,):
                raise NetworkLoadError(f"expected {n} costs, got {costs.shape}")
            if not np.all(costs > 0) or not np.all(np.isfinite(costs)):
                raise NetworkLoadError("all node costs must be strictly positive and finite")

        self.n = int(n)
        self.m = int(m)
        self.heads = heads
        self.tails = tails
        self.costs = costs
        self.out_ptr, self.out_arcs = self._csr(heads, n, m)
        self.in_ptr, self.in_arcs = self._csr(tails, n, m)
        for a in (self.heads, self.tails, self.costs, self.out_ptr, self.out_arcs,
                  self.in_ptr, self.in_arcs):
            a.setflags(write=False)

    @staticmethod
    def _csr(node_of_arc, n, m):
        order = np.argsort(node_of_arc, kind="stable").astype(np.int32)
        ptr = np.zeros(n + 1, dtype=np.int64)
        ptr[1:] = np.cumsum(np.bincount(node_of_arc, minlength=n))
        return ptr, order

    def out_arc_ids(self, u: int) -> np.ndarray:
        return self.out_arcs[self.out_ptr[u]:self.out_ptr[u + 1]]

    def in_arc_ids(self, v: int) -> np.ndarray:
        return self.in_arcs[self.in_ptr[v]:self.in_ptr[v + 1]]

    def total_cost(self, nodes) -> float:
        return float(sum(self.costs[v] for v in nodes))

    def __repr__(self):
        return f"DirectedNetwork(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class EdgeFeatureTable:
    """One d-dimensional feature vector per arc, row-indexed by arc id."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.float64)
        if mat.ndim != 2:
            raise ValueError("feature matrix must be 2-dimensional (m, d)")
        if not np.all(np.isfinite(mat)):
            raise ValueError("feature vectors must have finite entries")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def arc_count(self) -> int:
        return self.matrix.shape[0]


class WeightFunction:
    """Per-arc activation probabilities in [0, 1], fingerprinted for reuse checks."""

    __slots__ = ("values", "fingerprint")

    def __init__(self, values, validate: bool = True):
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("weights must be a 1-d array indexed by arc id")
        if validate and (arr.size and (arr.min() < 0.0 or arr.max() > 1.0 or not np.all(np.isfinite(arr)))):
            raise ValueError("edge weights must lie in [0, 1]")
        arr.setflags(write=False)
        self.values = arr
        self.fingerprint = hashlib.blake2b(arr.tobytes(), digest_size=16).hexdigest()

    def __len__(self):
        return self.values.shape[0]

    def __getitem__(self, e):
        return float(self.values[e])


def load_network(edge_path, cost_path=None, default_cost: float = 1.0) -> DirectedNetwork:
    """Load a network from a SNAP-style edge list, with optional per-node costs.

    Edge list: one ``u v`` pair per line, ``#`` comment lines ignored.  Node
    count is the largest id + 1.  Without a cost file every node gets
    ``default_cost``.
    """
    pairs = []
    max_id = -1
    with open(edge_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise NetworkLoadError(f"{edge_path}:{lineno}: expected 'u v', got {text!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise NetworkLoadError(f"{edge_path}:{lineno}: non-integer node id in {text!r}") from None
            if u < 0 or v < 0:
                raise NetworkLoadError(f"{edge_path}:{lineno}: negative node id")
            if u == v:
                raise NetworkLoadError(f"{edge_path}:{lineno}: self-loop {u} -> {v}")
            pairs.append((u, v))
            max_id = max(max_id, u, v)
    if max_id < 0:
        raise NetworkLoadError(f"{edge_path}: no arcs found")
    n = max_id + 1
    seen = set()
    for i, p in enumerate(pairs):
        if p in seen:
            raise NetworkLoadError(f"{edge_path}: duplicate arc {p[0]} -> {p[1]} (arc {i})")
        seen.add(p)
    if cost_path is not None:
        costs = load_costs(cost_path, n)
    else:
        if default_cost <= 0:
            raise NetworkLoadError("default cost must be positive")
        costs = np.full(n, float(default_cost))
    return DirectedNetwork(n, pairs, costs)


def load_costs(path, n: int) -> np.ndarray:
    """Load ``node cost`` pairs; every node in [0, n) must be covered."""
    costs = np.full(n, np.nan)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise NetworkLoadError(f"{path}:{lineno}: expected 'node cost', got {text!r}")
            try:
                node, cost = int(parts[0]), float(parts[1])
            except ValueError:
                raise NetworkLoadError(f"{path}:{lineno}: unparseable entry {text!r}") from None
            if not 0 <= node < n:
                raise NetworkLoadError(f"{path}:{lineno}: node {node} outside [0, {n})")
            if cost <= 0 or not np.isfinite(cost):
                raise NetworkLoadError(f"{path}:{lineno}: cost must be strictly positive")
            costs[node] = cost
    missing = np.flatnonzero(np.isnan(costs))
    if missing.size:
        raise NetworkLoadError(f"{path}: no cost for node(s) {missing[:10].tolist()}")
    return costs


def save_edge_list(net: DirectedNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in zip(net.heads, net.tails):
            fh.write(f"{u} {v}\n")


def save_costs(net: DirectedNetwork, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in range(net.n):
            fh.write(f"{v} {float(net.costs[v])!r}\n")


def load_node_embeddings(path) -> dict[int, np.ndarray]:
    """Load ``node f1 ... fd`` lines into a node -> vector map."""
    emb: dict[int, np.ndarray] = {}
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            try:
                node = int(parts[0])
                vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
            except ValueError:
                raise NetworkLoadError(f"{path}:{lineno}: unparseable embedding line") from None
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise NetworkLoadError(f"{path}:{lineno}: embedding dimension {vec.shape[0]} != {dim}")
            emb[node] = vec
    if not emb:
        raise NetworkLoadError(f"{path}: no embeddings found")
    return emb


def edge_features_from_node_embeddings(node_embeddings, net: DirectedNetwork) -> EdgeFeatureTable:
    """Arc features as the element-wise product of its endpoint embeddings."""
    if isinstance(node_embeddings, np.ndarray):
        if node_embeddings.shape[0] < net.n:
            raise ValueError(f"embeddings cover {node_embeddings.shape[0]} nodes, network has {net.n}")
        table = np.asarray(node_embeddings, dtype=np.float64)
    else:
        missing = [v for v in range(net.n) if v not in node_embeddings]
        if missing:
            raise ValueError(f"missing node embedding(s): {missing[:10]}")
        dims = {node_embeddings[v].shape[0] for v in range(net.n)}
        if len(dims) != 1:
            raise ValueError(f"inconsistent embedding dimensions: {sorted(dims)}")
        table = np.stack([np.asarray(node_embeddings[v], dtype=np.float64) for v in range(net.n)])
    return EdgeFeatureTable(table[net.heads] * table[net.tails])


def linear_weights(features: EdgeFeatureTable, theta, clamp: bool = False):
    """Weights ``w(e) = x_e . theta``; returns ``(WeightFunction, clamped_count)``.

    Without ``clamp`` any out-of-range product raises :class:`WeightRangeError`
    listing the offending arcs.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (features.dim,):
        raise ValueError(f"theta has dimension {theta.shape}, features have {features.dim}")
    raw = features.matrix @ theta
    out = (raw < 0.0) | (raw > 1.0)
    n_out = int(out.sum())
    if n_out and not clamp:
        bad = np.flatnonzero(out)
        raise WeightRangeError(bad.tolist(), raw[bad].tolist())
    return WeightFunction(np.clip(raw, 0.0, 1.0), validate=False), n_out


def synth_ground_truth(net: DirectedNetwork, mode: str, rng,
                       features: EdgeFeatureTable | None = None,
                       low: float = 0.0, high: float = 0.1,
                       max_tries: int = 50):
    """Build ground-truth weights; returns ``(theta_star_or_None, WeightFunction)``.

    ``uniform-random`` draws each weight i.i.d. from ``Unif(low, high)`` (no
    generalizing vector exists).  ``linear-planted`` draws a positive theta and
    rescales it until every product lands in ``[low, high]``, so the weights
    are exactly linear in the features.
    """
    if not (0.0 <= low < high <= 1.0):
        raise ValueError(f"need 0 <= low < high <= 1, got [{low}, {high}]")
    if mode == "uniform-random":
        return None, WeightFunction(rng.uniform(low, high, net.m))
    if mode != "linear-planted":
        raise ValueError(f"unknown ground-truth mode {mode!r}")
    if features is None:
        raise ValueError("linear-planted mode needs a feature table")
    if features.arc_count != net.m:
        raise ValueError("feature table does not match the network")
    for _ in range(max_tries):
        theta = np.abs(rng.standard_normal(features.dim))
        raw = features.matrix @ theta
        top = raw.max()
        if raw.min() <= 0 or top <= 0:
            continue
        # recompute from the scaled vector so weights are exactly linear in it;
        # the tiny margin keeps the recomputed max under `high` after rounding
        theta_star = theta * (high * (1.0 - 1e-9) / top)
        w = features.matrix @ theta_star
        if w.min() >= low and w.max() <= high:
            return theta_star, WeightFunction(w)
    raise ValueError(f"could not plant weights in [{low}, {high}] after {max_tries} tries")


def synth_network(n: int, m: int, rng, cost_low: float = 1.0, cost_high: float = 1.0) -> DirectedNetwork:
    """Random digraph with ``m`` distinct non-loop arcs and Unif costs."""
    if m > n * (n - 1):
        raise ValueError(f"m={m} exceeds the {n * (n - 1)} possible arcs")
    codes = rng.choice(n * (n - 1), size=m, replace=False)
    heads = codes // (n - 1)
    rest = codes % (n - 1)
    tails = np.where(rest < heads, rest, rest + 1)
    costs = np.full(n, cost_low) if cost_high <= cost_low else rng.uniform(cost_low, cost_high, n)
    return DirectedNetwork(n, list(zip(heads.tolist(), tails.tolist())), costs)


def synth_node_embeddings(n: int, d: int, rng, low: float = 0.5, high: float = 1.5) -> np.ndarray:
    """Positive synthetic node embeddings (stand-in for trained ones)."""
    return rng.uniform(low, high, size=(n, d))
