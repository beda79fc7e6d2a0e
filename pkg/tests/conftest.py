import numpy as np
import pytest

from imbandits.network import DirectedNetwork, WeightFunction, synth_network


@pytest.fixture
def path3():
    """a -> b -> c with weight 0.5 on both arcs."""
    return DirectedNetwork(3, [(0, 1), (1, 2)]), WeightFunction([0.5, 0.5])


@pytest.fixture
def diamond():
    """a -> {b, c} -> d with weight 0.5 everywhere."""
    net = DirectedNetwork(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    return net, WeightFunction([0.5] * 4)


def random_small_instance(rng, n_max=6, m_max=12, unit_costs=False):
    """Random digraph with random weights/costs, small enough for brute force."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, min(m_max, n * (n - 1)) + 1))
    if unit_costs:
        net = synth_network(n, m, rng)
    else:
        net = synth_network(n, m, rng, cost_low=0.5, cost_high=2.0)
    weights = WeightFunction(rng.uniform(0.0, 1.0, m))
    return net, weights
