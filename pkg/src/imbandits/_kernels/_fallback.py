"""Pure-Python reference kernels for cascade simulation and RR-set sampling.

The compiled backend (``_native``) implements the exact same draw-for-draw
random-number consumption: uniforms come from ``rng.random(COIN_BLOCK)``
blocks, one draw per sampled root and one per examined arc, so both backends
return bit-identical results from the same generator state.
"""

import numpy as np

COIN_BLOCK = 4096


class _Coins:
    """Block-buffered uniform draws from a numpy Generator."""

    __slots__ = ("_rng", "_buf", "_i")

    def __init__(self, rng):
        self._rng = rng
        self._buf = rng.random(COIN_BLOCK)
        self._i = 0

    def take(self):
        if self._i == COIN_BLOCK:
            self._buf = self._rng.random(COIN_BLOCK)
            self._i = 0
        u = self._buf[self._i]
        self._i += 1
        return u


def simulate_cascade(n, out_ptr, out_arcs, tails, weights, seeds, rng):
    """Run one independent cascade from ``seeds`` (sorted unique node ids).

    Breadth-first: when a node is dequeued, each of its out-arcs is flipped
    once, in arc-id order.  Returns ``(activated, observed_arcs, realizations)``
    with activated nodes in activation order and one observation per out-arc
    of every activated node.
    """
    coins = _Coins(rng)
    active = np.zeros(n, dtype=np.uint8)
    queue = []
    for s in seeds:
        active[s] = 1
        queue.append(int(s))
    observed = []
    realized = []
    qi = 0
    while qi < len(queue):
        u = queue[qi]
        qi += 1
        for k in range(int(out_ptr[u]), int(out_ptr[u + 1])):
            e = int(out_arcs[k])
            y = 1 if coins.take() < weights[e] else 0
            observed.append(e)
            realized.append(y)
            if y:
                v = int(tails[e])
                if not active[v]:
                    active[v] = 1
                    queue.append(v)
    return (
        np.array(queue, dtype=np.int32),
        np.array(observed, dtype=np.int32),
        np.array(realized, dtype=np.uint8),
    )


def sample_rr_sets(n, in_ptr, in_arcs, heads, weights, count, rng):
    """Sample ``count`` reverse-reachable sets.

    Per set: one uniform picks the root, then a reverse BFS flips one coin per
    in-arc of every dequeued node (before the membership check, so each arc is
    examined at most once).  Returns ``(flat_nodes, offsets, total_width)``
    where width counts coins flipped after the root draw.
    """
    coins = _Coins(rng)
    mark = np.zeros(n, dtype=np.int64)
    flat = []
    offsets = [0]
    total_width = 0
    for s in range(count):
        stamp = s + 1
        root = int(coins.take() * n)
        if root >= n:
            root = n - 1
        mark[root] = stamp
        queue = [root]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            for k in range(int(in_ptr[v]), int(in_ptr[v + 1])):
                e = int(in_arcs[k])
                total_width += 1
                if coins.take() < weights[e]:
                    u = int(heads[e])
                    if mark[u] != stamp:
                        mark[u] = stamp
                        queue.append(u)
        flat.extend(queue)
        offsets.append(len(flat))
    return (
        np.array(flat, dtype=np.int32),
        np.array(offsets, dtype=np.int64),
        total_width,
    )
