# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; consume randomness identically to ``_fallback``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

COIN_BLOCK = 4096

cdef Py_ssize_t _BLOCK = 4096


def simulate_cascade(Py_ssize_t n,
                     const cnp.int64_t[::1] out_ptr,
                     const cnp.int32_t[::1] out_arcs,
                     const cnp.int32_t[::1] tails,
                     const double[::1] weights,
                     const cnp.int32_t[::1] seeds,
                     object rng):
    """See ``_fallback.simulate_cascade``."""
    cdef object buf_obj = rng.random(COIN_BLOCK)
    cdef const double[::1] coins = buf_obj
    cdef Py_ssize_t ci = 0

    cdef Py_ssize_t m = tails.shape[0]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] queue_arr = np.empty(n, dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] active_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] active = active_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] obs_arr = np.empty(m, dtype=np.int32)
    cdef cnp.int32_t[::1] observed = obs_arr
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] real_arr = np.empty(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] realized = real_arr

    cdef Py_ssize_t qlen = 0, qi = 0, olen = 0, k
    cdef cnp.int32_t u, v
    cdef cnp.int32_t e
    cdef cnp.uint8_t y
    cdef Py_ssize_t i

    for i in range(seeds.shape[0]):
        u = seeds[i]
        active[u] = 1
        queue[qlen] = u
        qlen += 1

    while qi < qlen:
        u = queue[qi]
        qi += 1
        for k in range(out_ptr[u], out_ptr[u + 1]):
            e = out_arcs[k]
            if ci == _BLOCK:
                buf_obj = rng.random(COIN_BLOCK)
                coins = buf_obj
                ci = 0
            y = 1 if coins[ci] < weights[e] else 0
            ci += 1
            observed[olen] = e
            realized[olen] = y
            olen += 1
            if y:
                v = tails[e]
                if not active[v]:
                    active[v] = 1
                    queue[qlen] = v
                    qlen += 1

    return queue_arr[:qlen].copy(), obs_arr[:olen].copy(), real_arr[:olen].copy()


def sample_rr_sets(Py_ssize_t n,
                   const cnp.int64_t[::1] in_ptr,
                   const cnp.int32_t[::1] in_arcs,
                   const cnp.int32_t[::1] heads,
                   const double[::1] weights,
                   Py_ssize_t count,
                   object rng):
    """See ``_fallback.sample_rr_sets``."""
    cdef object buf_obj = rng.random(COIN_BLOCK)
    cdef const double[::1] coins = buf_obj
    cdef Py_ssize_t ci = 0

    cdef cnp.ndarray[cnp.int64_t, ndim=1] mark_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] mark = mark_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] queue_arr = np.empty(max(n, 1), dtype=np.int32)
    cdef cnp.int32_t[::1] queue = queue_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] offsets_arr = np.empty(count + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] offsets = offsets_arr

    cdef Py_ssize_t cap = 4 * count + 16
    cdef cnp.ndarray[cnp.int32_t, ndim=1] flat_arr = np.empty(cap, dtype=np.int32)
    cdef cnp.int32_t[::1] flat = flat_arr
    cdef Py_ssize_t flen = 0

    cdef long long total_width = 0
    cdef Py_ssize_t s, qi, qlen, k, root
    cdef cnp.int64_t stamp
    cdef cnp.int32_t v, u
    cdef cnp.int32_t e

    offsets[0] = 0
    for s in range(count):
        stamp = s + 1
        if ci == _BLOCK:
            buf_obj = rng.random(COIN_BLOCK)
            coins = buf_obj
            ci = 0
        root = <Py_ssize_t>(coins[ci] * n)
        ci += 1
        if root >= n:
            root = n - 1
        mark[root] = stamp
        queue[0] = <cnp.int32_t>root
        qlen = 1
        qi = 0
        while qi < qlen:
            v = queue[qi]
            qi += 1
            for k in range(in_ptr[v], in_ptr[v + 1]):
                e = in_arcs[k]
                total_width += 1
                if ci == _BLOCK:
                    buf_obj = rng.random(COIN_BLOCK)
                    coins = buf_obj
                    ci = 0
                if coins[ci] < weights[e]:
                    ci += 1
                    u = heads[e]
                    if mark[u] != stamp:
                        mark[u] = stamp
                        queue[qlen] = u
                        qlen += 1
                else:
                    ci += 1
        if flen + qlen > cap:
            while flen + qlen > cap:
                cap *= 2
            new_flat = np.empty(cap, dtype=np.int32)
            new_flat[:flen] = flat_arr[:flen]
            flat_arr = new_flat
            flat = flat_arr
        for k in range(qlen):
            flat[flen] = queue[k]
            flen += 1
        offsets[s + 1] = flen

    return flat_arr[:flen].copy(), offsets_arr, int(total_width)
