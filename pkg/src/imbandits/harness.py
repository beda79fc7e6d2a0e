"""Experiment driver: per-round budget B/T, warm start, round loop,
regret-proxy accounting, and CSV emission."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .diffusion import simulate_cascade
from .learners import LEARNER_KINDS, make_learner
from .network import (DirectedNetwork, EdgeFeatureTable, WeightFunction,
                      edge_features_from_node_embeddings, load_network,
                      load_node_embeddings, synth_ground_truth, synth_network,
                      synth_node_embeddings)
from .oracle import RRSpreadEvaluator, SeedLottery, oracle_imb, oracle_imb_m
from .rrsets import CeiParams, build_collection

TRACE_COLUMNS = ("replication", "round", "algorithm", "proxy", "cum_proxy",
                 "expected_cost", "realized_cost", "realized_spread")
SUMMARY_COLUMNS = ("round", "algorithm", "mean_cum_proxy", "std_cum_proxy")


@dataclass
class ExperimentConfig:
    """Everything one experiment run needs; file/flag parsing lives in the CLI."""

    T: int = 1000
    B: float = 2000.0
    d: int = 10
    algorithm: str = "co"
    warm_rounds: int = 200
    warm_seed_size: int = 1
    v: float = 1.0
    D: float = 1.0
    cei_l: float = 1.0
    cei_eps: float | None = None  # None: 3/sqrt(n) at runtime
    allow_loose_eps: bool = False
    seed: int = 0
    reps: int = 1
    edges: str | None = None
    costs: str | None = None
    embeddings: str | None = None
    weight_mode: str = "linear-planted"
    weight_low: float = 0.01
    weight_high: float = 0.15
    synth_nodes: int = 25
    synth_arcs: int = 319
    out: str | None = None

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if self.B <= 0:
            raise ValueError("B must be positive")
        if self.warm_rounds < 0:
            raise ValueError("warm_rounds must be nonnegative")
        if self.algorithm not in LEARNER_KINDS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.reps < 1:
            raise ValueError("need at least one replication")


@dataclass(frozen=True)
class RoundRecord:
    round: int
    proxy: float
    cum_proxy: float
    expected_cost: float
    realized_cost: float
    realized_spread: int


@dataclass
class RegretTrace:
    replication: int
    algorithm: str
    master_seed: int = 0  # replication stream = spawn #(2 + replication) of this seed
    records: list[RoundRecord] = field(default_factory=list)

    @property
    def cum_proxy(self) -> float:
        return self.records[-1].cum_proxy if self.records else 0.0

    @property
    def total_expected_cost(self) -> float:
        return math.fsum(r.expected_cost for r in self.records)


@dataclass
class ExperimentInstance:
    net: DirectedNetwork
    features: EdgeFeatureTable
    truth: WeightFunction
    theta_star: np.ndarray | None


@dataclass
class RegretReference:
    """Per-experiment baseline: the budgeted oracle run once on the true weights.

    The same true-weights RR collection prices both the reference lottery and
    every round's chosen seed set, so the per-round proxy is a difference of
    coverage estimates with matched noise.
    """

    collection: object
    lottery: SeedLottery
    value: float
    truth: WeightFunction

    def seed_spread(self, seeds) -> float:
        return self.collection.spread_estimate(seeds, self.truth)


def proxy_regret(reference_value: float, realized_estimate: float) -> float:
    """Reference spread minus the round's estimated spread; may be negative."""
    return reference_value - realized_estimate


def per_round_budget(B: float, T: int) -> float:
    """B/T, nudged down so the T-round total provably stays within B in floats."""
    b = B / T
    while math.fsum([b] * T) > B:
        b = math.nextafter(b, 0.0)
    return b


def default_eps(n: int) -> float:
    return 3.0 / math.sqrt(n)


def build_instance(config: ExperimentConfig, rng) -> ExperimentInstance:
    """Load the network/features from files when given, else synthesize them."""
    if config.edges:
        net = load_network(config.edges, config.costs)
    else:
        net = synth_network(config.synth_nodes, config.synth_arcs, rng)
    if config.embeddings:
        emb = load_node_embeddings(config.embeddings)
        features = edge_features_from_node_embeddings(emb, net)
        if features.dim != config.d:
            raise ValueError(f"embeddings have d={features.dim}, config says {config.d}")
    else:
        features = edge_features_from_node_embeddings(
            synth_node_embeddings(net.n, config.d, rng), net)
    theta_star, truth = synth_ground_truth(
        net, config.weight_mode, rng, features=features,
        low=config.weight_low, high=config.weight_high)
    return ExperimentInstance(net, features, truth, theta_star)


def make_cei(config: ExperimentConfig, net: DirectedNetwork, budget: float) -> CeiParams:
    eps = config.cei_eps if config.cei_eps is not None else default_eps(net.n)
    return CeiParams(l=config.cei_l, eps=eps, budget=budget,
                     max_cost=float(net.costs.max()),
                     allow_loose_eps=config.allow_loose_eps)


def build_reference(instance: ExperimentInstance, config: ExperimentConfig, rng) -> RegretReference:
    budget = per_round_budget(config.B, config.T)
    cei = make_cei(config, instance.net, budget)
    collection = build_collection(instance.net, instance.truth, cei, rng)
    lottery = oracle_imb(instance.net, RRSpreadEvaluator(collection), budget)
    return RegretReference(collection, lottery, lottery.expected_spread, instance.truth)


def warm_start(net: DirectedNetwork, truth: WeightFunction, learner,
               warm_rounds: int, warm_seed_size: int, rng) -> None:
    """Random seeding rounds whose feedback updates beliefs; no budget charged."""
    if warm_seed_size > net.n:
        raise ValueError(f"warm seed size {warm_seed_size} exceeds n={net.n}")
    for _ in range(warm_rounds):
        seeds = rng.choice(net.n, size=warm_seed_size, replace=False)
        outcome = simulate_cascade(net, truth, seeds, rng)
        learner.update(outcome.observed_arcs, outcome.realizations)


def run_round(instance: ExperimentInstance, learner, t: int, budget: float,
              cei: CeiParams, reference: RegretReference, rng) -> tuple[RoundRecord, frozenset]:
    """One campaign round; the cumulative column is filled in by the caller."""
    net = instance.net
    estimates = WeightFunction(learner.weights(t, rng), validate=False)
    lottery = oracle_imb_m(net, estimates, budget, cei, rng)
    seeds = lottery.draw(rng)
    outcome = simulate_cascade(net, instance.truth, seeds, rng)
    learner.update(outcome.observed_arcs, outcome.realizations)
    proxy = proxy_regret(reference.value, reference.seed_spread(seeds))
    record = RoundRecord(
        round=t, proxy=proxy, cum_proxy=math.nan,
        expected_cost=lottery.expected_cost,
        realized_cost=net.total_cost(seeds),
        realized_spread=outcome.size)
    return record, seeds


def run_replication(instance: ExperimentInstance, config: ExperimentConfig,
                    reference: RegretReference, replication: int, rng) -> RegretTrace:
    learner = make_learner(config.algorithm, instance.features, config.v, config.D)
    warm_start(instance.net, instance.truth, learner,
               config.warm_rounds, config.warm_seed_size, rng)
    budget = per_round_budget(config.B, config.T)
    cei = make_cei(config, instance.net, budget)
    trace = RegretTrace(replication, config.algorithm, config.seed)
    cum = 0.0
    for t in range(1, config.T + 1):
        record, _ = run_round(instance, learner, t, budget, cei, reference, rng)
        cum += record.proxy
        trace.records.append(replace(record, cum_proxy=cum))
    return trace


def run_experiment(config: ExperimentConfig):
    """All replications of one algorithm on one instance.

    Returns ``(traces, reference, instance)``; writes the trace and summary
    CSVs when ``config.out`` is set.  The instance and reference derive from
    dedicated seed streams, so they match across algorithms for a fixed seed.
    """
    root = np.random.SeedSequence(config.seed)
    inst_ss, ref_ss, *rep_ss = root.spawn(2 + config.reps)
    instance = build_instance(config, np.random.default_rng(inst_ss))
    reference = build_reference(instance, config, np.random.default_rng(ref_ss))
    traces = [
        run_replication(instance, config, reference, r, np.random.default_rng(rep_ss[r]))
        for r in range(config.reps)
    ]
    if config.out:
        write_trace_csv(traces, config.out)
        write_summary_csv(traces, summary_path(config.out))
    return traces, reference, instance


def summary_path(trace_path: str) -> str:
    stem, ext = os.path.splitext(trace_path)
    return f"{stem}_summary{ext or '.csv'}"


def write_trace_csv(traces: list[RegretTrace], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for trace in traces:
            for r in trace.records:
                writer.writerow([trace.replication, r.round, trace.algorithm,
                                 repr(r.proxy), repr(r.cum_proxy),
                                 repr(r.expected_cost), repr(r.realized_cost),
                                 r.realized_spread])


def write_summary_csv(traces: list[RegretTrace], path: str) -> None:
    """Per-round mean and standard deviation of the cumulative proxy across replications."""
    if not traces:
        raise ValueError("no traces to summarize")
    T = len(traces[0].records)
    algorithm = traces[0].algorithm
    cum = np.array([[r.cum_proxy for r in trace.records] for trace in traces])
    mean = cum.mean(axis=0)
    std = cum.std(axis=0, ddof=1) if len(traces) > 1 else np.zeros(T)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for t in range(T):
            writer.writerow([t + 1, algorithm, repr(float(mean[t])), repr(float(std[t]))])


def config_from_mapping(pairs: dict) -> ExperimentConfig:
    """Build a config from string key/value pairs (config files, CLI overrides)."""
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    aliases = {"alg": "algorithm", "warm": "warm_rounds", "eps": "cei_eps",
               "l": "cei_l", "n": "synth_nodes", "arcs": "synth_arcs"}
    converted = {}
    for raw_key, value in pairs.items():
        key = aliases.get(raw_key, raw_key)
        if key not in kinds:
            raise ValueError(f"unknown config key {raw_key!r}")
        if value is None:
            continue
        kind = kinds[key]
        if key in ("cei_eps",):
            converted[key] = float(value)
        elif kind == "int":
            converted[key] = int(value)
        elif kind == "float":
            converted[key] = float(value)
        elif kind == "bool":
            converted[key] = str(value).lower() in ("1", "true", "yes", "on")
        else:
            converted[key] = str(value)
    return ExperimentConfig(**converted)
