"""Budgeted seeding oracles: cost-ratio greedy chain, two-point budget LP, the
RR-backed randomized oracle, a full-chain LP, and a brute-force optimum for tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffusion import exact_spread, exact_spread_all_subsets, monte_carlo_spread
from .network import DirectedNetwork, WeightFunction
from .rrsets import CeiParams, RRCollection, build_collection


class BudgetInfeasibleError(ValueError):
    """No feasible seeding distribution under the given budget."""


@dataclass(frozen=True)
class SeedLottery:
    """Randomized seeding decision: at most two nested seed sets with probabilities.

    Expected cost never exceeds the budget the lottery was solved for; the
    recorded expected spread is under the evaluator that produced it.
    """

    sets: tuple[frozenset, ...]
    probs: tuple[float, ...]
    expected_cost: float
    expected_spread: float

    def draw(self, rng) -> frozenset:
        u = rng.random()
        return self.sets[0] if u < self.probs[0] else self.sets[-1]

    @property
    def support_size(self) -> int:
        return len(self.sets)


def draw_seed(lottery: SeedLottery, rng) -> frozenset:
    return lottery.draw(rng)


class SpreadEvaluator:
    """Fixed spread function handed to the oracle; greedy and the LP see the same values.

    Any evaluator works mechanically, but only the exact and RR-coverage ones
    back the oracle's approximation guarantees; Monte Carlo is best-effort.
    """

    kind = "abstract"

    def __init__(self, n: int):
        self.n = n

    def spread(self, seeds: frozenset) -> float:
        raise NotImplementedError

    # Greedy support: default implementation re-evaluates spreads per candidate.
    def greedy_begin(self):
        return {"seeds": frozenset(), "value": 0.0}

    def greedy_value(self, state) -> float:
        return state["value"]

    def greedy_gains(self, state) -> np.ndarray:
        base = state["value"]
        gains = np.zeros(self.n)
        for v in range(self.n):
            if v not in state["seeds"]:
                gains[v] = self.spread(state["seeds"] | {v}) - base
        return gains

    def greedy_add(self, state, v: int) -> None:
        state["seeds"] = state["seeds"] | {v}
        state["value"] = self.spread(state["seeds"])


class _CachedEvaluator(SpreadEvaluator):
    def __init__(self, n: int):
        super().__init__(n)
        self._cache: dict[frozenset, float] = {}

    def spread(self, seeds) -> float:
        key = frozenset(int(v) for v in seeds)
        if key not in self._cache:
            self._cache[key] = self._compute(key)
        return self._cache[key]

    def _compute(self, seeds: frozenset) -> float:
        raise NotImplementedError


class ExactSpreadEvaluator(_CachedEvaluator):
    """Exhaustive-enumeration spreads (small instances only)."""

    kind = "exact"

    def __init__(self, net: DirectedNetwork, weights: WeightFunction):
        super().__init__(net.n)
        self.net = net
        self.weights = weights

    def _compute(self, seeds):
        return exact_spread(self.net, self.weights, seeds)


class MonteCarloSpreadEvaluator(_CachedEvaluator):
    """Simulation spreads; cached so one oracle call sees one consistent function."""

    kind = "monte-carlo"

    def __init__(self, net: DirectedNetwork, weights: WeightFunction, n_sims: int, rng):
        super().__init__(net.n)
        self.net = net
        self.weights = weights
        self.n_sims = n_sims
        self.rng = rng

    def _compute(self, seeds):
        return monte_carlo_spread(self.net, self.weights, seeds, self.n_sims, self.rng)[0]


class RRSpreadEvaluator(SpreadEvaluator):
    """Coverage spreads ``n * F(S)`` over a fixed RR collection, with an
    uncovered-count accelerated greedy."""

    kind = "rr-collection"

    def __init__(self, collection: RRCollection):
        super().__init__(collection.n)
        self.collection = collection

    def spread(self, seeds) -> float:
        return self.n * self.collection.coverage_fraction(seeds)

    def greedy_begin(self):
        return {"covered": np.zeros(self.collection.count, dtype=bool), "hits": 0}

    def greedy_value(self, state) -> float:
        return self.n * state["hits"] / self.collection.count

    def greedy_gains(self, state) -> np.ndarray:
        counts = self.collection.marginal_counts(state["covered"])
        return counts * (self.n / self.collection.count)

    def greedy_add(self, state, v: int) -> None:
        ids = self.collection.sets_containing(int(v))
        fresh = ids[~state["covered"][ids]]
        state["covered"][fresh] = True
        state["hits"] += int(fresh.shape[0])


@dataclass(frozen=True)
class GreedyChain:
    """Nested prefixes from cost-ratio greedy: sets[0] is empty, sets[-1] the
    first prefix whose cost exceeds the budget (or all of V if none does)."""

    sets: list[frozenset]
    costs: list[float]
    spreads: list[float]
    exhausted: bool


def greedy_chain(net: DirectedNetwork, evaluator: SpreadEvaluator, budget: float,
                 costs=None) -> GreedyChain:
    """Grow seed sets by maximum spread-gain per unit cost, ties to the smallest id."""
    node_costs = net.costs if costs is None else np.asarray(costs, dtype=np.float64)
    state = evaluator.greedy_begin()
    sets = [frozenset()]
    chain_costs = [0.0]
    spreads = [evaluator.greedy_value(state)]
    chosen: set[int] = set()
    cum_cost = 0.0
    exhausted = True
    for _ in range(net.n):
        ratios = evaluator.greedy_gains(state) / node_costs
        if chosen:
            ratios[list(chosen)] = -np.inf
        v = int(np.argmax(ratios))
        evaluator.greedy_add(state, v)
        chosen.add(v)
        cum_cost += float(node_costs[v])
        sets.append(sets[-1] | {v})
        chain_costs.append(cum_cost)
        spreads.append(evaluator.greedy_value(state))
        if cum_cost > budget:
            exhausted = False
            break
    return GreedyChain(sets, chain_costs, spreads, exhausted)


def two_point_lp(f_minus: float, f_plus: float, cost_minus: float, cost_plus: float,
                 budget: float) -> tuple[float, float]:
    """Closed-form optimum of max p*f_- + q*f_+ s.t. p*c_- + q*c_+ <= b, p+q = 1.

    The returned pair satisfies the budget constraint exactly in floating
    point (q is nudged down by ulps if rounding ever pushed the cost over).
    """
    if cost_minus > budget:
        raise BudgetInfeasibleError(
            f"cheap side costs {cost_minus}, over the budget {budget}")
    if budget >= cost_plus:
        q = 1.0 if f_plus >= f_minus else 0.0
    elif f_plus <= f_minus:
        q = 0.0
    else:
        q = (budget - cost_minus) / (cost_plus - cost_minus)
        q = min(max(q, 0.0), 1.0)
    while (1.0 - q) * cost_minus + q * cost_plus > budget:
        q = math.nextafter(q, 0.0)
    return 1.0 - q, q


def oracle_imb(net: DirectedNetwork, evaluator: SpreadEvaluator, budget: float,
               costs=None) -> SeedLottery:
    """Randomized budgeted seeding with a (1 - 1/e) expected-spread guarantee.

    Runs the cost-ratio greedy until the budget is first exceeded, then mixes
    the last feasible prefix with the first infeasible one via the two-point
    LP.  When the whole node set stays within budget it is returned outright.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    node_costs = net.costs if costs is None else np.asarray(costs, dtype=np.float64)
    chain = greedy_chain(net, evaluator, budget, node_costs)
    if chain.exhausted:
        full = chain.sets[-1]
        return SeedLottery((full,), (1.0,), chain.costs[-1], chain.spreads[-1])
    p, q = two_point_lp(chain.spreads[-2], chain.spreads[-1],
                        chain.costs[-2], chain.costs[-1], budget)
    if q == 0.0:
        return SeedLottery((chain.sets[-2],), (1.0,), chain.costs[-2], chain.spreads[-2])
    if p == 0.0:
        return SeedLottery((chain.sets[-1],), (1.0,), chain.costs[-1], chain.spreads[-1])
    return SeedLottery(
        (chain.sets[-2], chain.sets[-1]), (p, q),
        p * chain.costs[-2] + q * chain.costs[-1],
        p * chain.spreads[-2] + q * chain.spreads[-1])


def oracle_imb_m(net: DirectedNetwork, weights: WeightFunction, budget: float,
                 params: CeiParams, rng, costs=None) -> SeedLottery:
    """The same oracle with spreads estimated on a freshly sampled RR collection."""
    collection = build_collection(net, weights, params, rng)
    return oracle_imb(net, RRSpreadEvaluator(collection), budget, costs)


def full_chain_lp(chain, budget: float):
    """Optimal distribution over all chain prefixes under the budget.

    ``chain`` is a sequence of ``(seed_set, cost, spread)`` triples with
    nondecreasing costs.  Solved by enumerating the supports of basic
    solutions (singletons and feasible/infeasible pairs); returns
    ``(value, [(index, prob), ...])``.
    """
    costs = [float(c) for _, c, _ in chain]
    spreads = [float(f) for _, _, f in chain]
    k = len(chain)
    if k == 0:
        raise ValueError("empty chain")
    if any(costs[i] > costs[i + 1] for i in range(k - 1)):
        raise ValueError("chain costs must be nondecreasing")
    feasible = [i for i in range(k) if costs[i] <= budget]
    if not feasible:
        raise BudgetInfeasibleError(f"no chain prefix fits the budget {budget}")
    best_value = -math.inf
    best_support: list[tuple[int, float]] = []
    for i in feasible:
        if spreads[i] > best_value:
            best_value = spreads[i]
            best_support = [(i, 1.0)]
    for i in feasible:
        for j in range(k):
            if costs[j] <= budget or spreads[j] <= spreads[i]:
                continue
            p, q = two_point_lp(spreads[i], spreads[j], costs[i], costs[j], budget)
            value = p * spreads[i] + q * spreads[j]
            if value > best_value:
                best_value = value
                best_support = [(i, p), (j, q)] if p > 0 else [(j, q)]
    return best_value, best_support


def brute_force_opt(net: DirectedNetwork, weights: WeightFunction, costs, budget: float):
    """Exact optimum of the budgeted seeding LP over all seed-set distributions.

    A basic optimal solution puts mass on at most two seed sets, so the
    search enumerates singletons and feasible/infeasible pairs over the whole
    power set, with exact spreads.  Returns ``(value, ((set, prob), ...))``.
    """
    if net.n > 12:
        raise ValueError(f"brute force caps at n=12, got {net.n}")
    node_costs = net.costs if costs is None else np.asarray(costs, dtype=np.float64)
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    f_all = exact_spread_all_subsets(net, weights)
    size = 1 << net.n
    cost_all = np.zeros(size)
    for mask in range(1, size):
        low = mask & -mask
        cost_all[mask] = cost_all[mask ^ low] + node_costs[low.bit_length() - 1]

    feasible = cost_all <= budget
    fa = f_all[feasible]
    best_idx = int(np.argmax(fa))
    best_value = float(fa[best_idx])
    best_mask = int(np.flatnonzero(feasible)[best_idx])
    best_support = [(best_mask, 1.0)]

    if not np.all(feasible):
        ca = cost_all[feasible]
        cb = cost_all[~feasible]
        fb = f_all[~feasible]
        # q limited by the budget line between each feasible/infeasible pair
        qmat = (budget - ca[:, None]) / (cb[None, :] - ca[:, None])
        vals = fa[:, None] + qmat * (fb[None, :] - fa[:, None])
        vals[fb[None, :] <= fa[:, None]] = -np.inf
        pair_best = float(vals.max(initial=-np.inf))
        if pair_best > best_value:
            i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
            q = float(qmat[i, j])
            mask_a = int(np.flatnonzero(feasible)[i])
            mask_b = int(np.flatnonzero(~feasible)[j])
            best_value = pair_best
            best_support = [(mask_a, 1.0 - q), (mask_b, q)]

    witness = tuple(
        (frozenset(v for v in range(net.n) if mask >> v & 1), prob)
        for mask, prob in best_support)
    return best_value, witness
