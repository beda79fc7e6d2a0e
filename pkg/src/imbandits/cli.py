"""Command-line front end: single cascades, spread estimates, seeding lotteries,
full experiments, and the closed-form regret-bound diagnostic."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .diffusion import exact_spread, monte_carlo_spread, simulate_cascade
from .harness import config_from_mapping, run_experiment, summary_path
from .learners import regret_bound_constant
from .network import WeightFunction, load_network
from .oracle import ExactSpreadEvaluator, RRSpreadEvaluator, oracle_imb
from .rrsets import CeiParams, build_collection


def _add_network_args(parser):
    parser.add_argument("--edges", required=True, help="edge list file (u v per line)")
    parser.add_argument("--costs", help="node cost file (node cost per line)")
    parser.add_argument("--weights", help="edge weight file, one value per arc line")
    parser.add_argument("--const-weight", type=float,
                        help="use one constant weight on every arc")
    parser.add_argument("--seed", type=int, default=0, help="rng seed")


def _load_net_weights(args):
    net = load_network(args.edges, args.costs)
    if (args.weights is None) == (args.const_weight is None):
        raise SystemExit("supply exactly one of --weights / --const-weight")
    if args.const_weight is not None:
        values = np.full(net.m, float(args.const_weight))
    else:
        values = np.loadtxt(args.weights, ndmin=1)
        if values.shape != (net.m,):
            raise SystemExit(f"expected {net.m} weights, got {values.shape}")
    return net, WeightFunction(values)


def _parse_seeds(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def cmd_simulate(args) -> int:
    net, weights = _load_net_weights(args)
    rng = np.random.default_rng(args.seed)
    outcome = simulate_cascade(net, weights, _parse_seeds(args.seeds), rng)
    print(f"activated {outcome.size}: {sorted(outcome.activated_set)}")
    successes = int(outcome.realizations.sum())
    print(f"observed {outcome.observed_arcs.shape[0]} arcs, {successes} successes")
    return 0


def cmd_spread(args) -> int:
    net, weights = _load_net_weights(args)
    seeds = _parse_seeds(args.seeds)
    rng = np.random.default_rng(args.seed)
    if args.method == "exact":
        print(repr(exact_spread(net, weights, seeds)))
    elif args.method == "mc":
        est, err = monte_carlo_spread(net, weights, seeds, args.sims, rng)
        print(f"{est!r} stderr {err!r}")
    else:
        cei = CeiParams(l=args.l, eps=args.eps, budget=args.budget,
                        max_cost=float(net.costs.max()),
                        allow_loose_eps=args.loose_eps)
        coll = build_collection(net, weights, cei, rng)
        print(f"{coll.spread_estimate(seeds, weights)!r} ({coll.count} RR sets)")
    return 0


def cmd_oracle(args) -> int:
    net, weights = _load_net_weights(args)
    rng = np.random.default_rng(args.seed)
    if args.method == "exact":
        evaluator = ExactSpreadEvaluator(net, weights)
    else:
        cei = CeiParams(l=args.l, eps=args.eps, budget=args.budget,
                        max_cost=float(net.costs.max()),
                        allow_loose_eps=args.loose_eps)
        evaluator = RRSpreadEvaluator(build_collection(net, weights, cei, rng))
    lottery = oracle_imb(net, evaluator, args.budget)
    for seeds, prob in zip(lottery.sets, lottery.probs):
        print(f"p={prob!r} seeds={sorted(seeds)}")
    print(f"expected_cost {lottery.expected_cost!r}")
    print(f"expected_spread {lottery.expected_spread!r}")
    return 0


def cmd_run(args) -> int:
    pairs = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise SystemExit(f"{args.config}:{lineno}: expected key=value")
                key, _, value = text.partition("=")
                pairs[key.strip()] = value.strip()
    for key in ("T", "B", "d", "alg", "warm", "warm_seed_size", "v", "D", "eps",
                "l", "seed", "reps", "out", "edges", "costs", "embeddings",
                "weight_mode", "weight_low", "weight_high", "n", "arcs",
                "allow_loose_eps"):
        value = getattr(args, key, None)
        if value is not None:
            pairs[key] = value
    config = config_from_mapping(pairs)
    if not config.out:
        raise SystemExit("an output CSV path is required (--out or out= in the config)")
    traces, reference, _ = run_experiment(config)
    print(f"reference lottery value {reference.value!r}")
    for trace in traces:
        print(f"rep {trace.replication}: cum_proxy {trace.cum_proxy!r} "
              f"expected_cost_total {trace.total_expected_cost!r}")
    print(f"wrote {config.out} and {summary_path(config.out)}")
    return 0


def cmd_bound(args) -> int:
    value = regret_bound_constant(args.n, args.m, args.d, args.T, args.v, args.D,
                                  eta=args.eta)
    print(repr(value))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imbandits",
        description="Budgeted influence-maximization semi-bandits toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one independent cascade")
    _add_network_args(p_sim)
    p_sim.add_argument("--seeds", required=True, help="seed node ids, e.g. '0,3,5'")
    p_sim.set_defaults(func=cmd_simulate)

    p_spread = sub.add_parser("spread", help="estimate the spread of a seed set")
    _add_network_args(p_spread)
    p_spread.add_argument("--seeds", required=True)
    p_spread.add_argument("--method", choices=("exact", "mc", "rr"), default="mc")
    p_spread.add_argument("--sims", type=int, default=10000, help="MC sample count")
    p_spread.add_argument("--eps", type=float, default=0.5, help="RR accuracy")
    p_spread.add_argument("--l", type=float, default=1.0, help="RR failure exponent")
    p_spread.add_argument("--budget", type=float, default=1.0,
                          help="per-round budget the RR size rule assumes")
    p_spread.add_argument("--loose-eps", action="store_true",
                          help="drop the eps <= 3/sqrt(n) guarantee check")
    p_spread.set_defaults(func=cmd_spread)

    p_oracle = sub.add_parser("oracle", help="print the budgeted seeding lottery")
    _add_network_args(p_oracle)
    p_oracle.add_argument("--budget", type=float, required=True)
    p_oracle.add_argument("--method", choices=("exact", "rr"), default="rr")
    p_oracle.add_argument("--eps", type=float, default=0.5)
    p_oracle.add_argument("--l", type=float, default=1.0)
    p_oracle.add_argument("--loose-eps", action="store_true")
    p_oracle.set_defaults(func=cmd_oracle)

    p_run = sub.add_parser("run", help="run a full experiment, writing CSV traces")
    p_run.add_argument("--config", help="key=value config file")
    p_run.add_argument("--T", type=int)
    p_run.add_argument("--B", type=float)
    p_run.add_argument("--d", type=int)
    p_run.add_argument("--alg", choices=("co", "lin-ts", "lin-ucb", "cucb"))
    p_run.add_argument("--warm", type=int, help="warm-start rounds")
    p_run.add_argument("--warm-seed-size", dest="warm_seed_size", type=int)
    p_run.add_argument("--v", type=float)
    p_run.add_argument("--D", type=float)
    p_run.add_argument("--eps", type=float)
    p_run.add_argument("--l", type=float)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--reps", type=int)
    p_run.add_argument("--out", help="trace CSV path")
    p_run.add_argument("--edges")
    p_run.add_argument("--costs")
    p_run.add_argument("--embeddings")
    p_run.add_argument("--weight-mode", dest="weight_mode",
                       choices=("linear-planted", "uniform-random"))
    p_run.add_argument("--weight-low", dest="weight_low", type=float)
    p_run.add_argument("--weight-high", dest="weight_high", type=float)
    p_run.add_argument("--n", type=int, help="synthetic network node count")
    p_run.add_argument("--arcs", type=int, help="synthetic network arc count")
    p_run.add_argument("--allow-loose-eps", dest="allow_loose_eps",
                       action="store_const", const="true")
    p_run.set_defaults(func=cmd_run)

    p_bound = sub.add_parser("bound", help="closed-form scaled-regret bound")
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--m", type=int, required=True)
    p_bound.add_argument("--d", type=int, required=True)
    p_bound.add_argument("--T", type=int, required=True)
    p_bound.add_argument("--v", type=float, default=1.0)
    p_bound.add_argument("--D", type=float, default=1.0)
    p_bound.add_argument("--eta", type=float, default=1.0 - 1.0 / np.e)
    p_bound.set_defaults(func=cmd_bound)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
