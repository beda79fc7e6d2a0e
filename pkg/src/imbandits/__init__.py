"""Budgeted influence-maximization semi-bandits with linear edge-weight generalization.

Independent-cascade diffusion with edge semi-bandit feedback, reverse-reachable
set spread estimation, a randomized (1 - 1/e) budgeted seeding oracle, and
online learners (cumulative oversampling plus TS/UCB/CUCB baselines) driven by
an experiment harness that reports a cumulative regret proxy.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .diffusion import (CascadeOutcome, exact_spread, exact_spread_all_subsets,
                        monte_carlo_spread, simulate_cascade)
from .harness import ExperimentConfig, RegretTrace, run_experiment
from .learners import (CumulativeOversampling, Cucb, LinearThompson, LinearUcb,
                       exploration_radii, make_learner, regret_bound_constant)
from .network import (DirectedNetwork, EdgeFeatureTable, WeightFunction,
                      edge_features_from_node_embeddings, linear_weights,
                      load_network, synth_ground_truth)
from .oracle import (ExactSpreadEvaluator, MonteCarloSpreadEvaluator,
                     RRSpreadEvaluator, SeedLottery, brute_force_opt,
                     draw_seed, full_chain_lp, greedy_chain, oracle_imb,
                     oracle_imb_m, two_point_lp)
from .rrsets import (CeiParams, RRCollection, build_collection,
                     cei_sample_size, sample_collection, sample_rr_set)

__version__ = "0.1.0"
