# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sign-vector search kernel.

Node-for-node identical to `_bnb_py.search`; see that module for the
search contract. This twin exists because the depth-first loop is the
hot path of column-augmentation construction.
"""

from libc.stdlib cimport free, malloc

import numpy as np


cdef inline long long _llabs(long long x) noexcept nogil:
    return -x if x < 0 else x


cdef bint _dfs(const signed char * ct, long long * s, signed char * c,
               int t, int L, int n, long long m, long long m_eff,
               bint prune, long long * nodes) noexcept nogil:
    cdef int j, k, nvals
    cdef long long a, lim
    cdef signed char forced = 0
    cdef signed char v
    cdef signed char vals[2]
    cdef const signed char * row

    if t == L:
        for j in range(n):
            if _llabs(s[j]) > m:
                return False
        return True

    row = ct + t * n
    if prune:
        lim = m_eff + (L - t)
        for j in range(n):
            a = _llabs(s[j])
            if a > lim:
                return False
            if forced == 0 and a == lim:
                forced = -row[j] if s[j] > 0 else row[j]

    if forced != 0:
        vals[0] = forced
        nvals = 1
    else:
        vals[0] = 1
        vals[1] = -1
        nvals = 2

    for k in range(nvals):
        v = vals[k]
        c[t] = v
        for j in range(n):
            s[j] += v * row[j]
        nodes[0] += 1
        if _dfs(ct, s, c, t + 1, L, n, m, m_eff, prune, nodes):
            return True
        for j in range(n):
            s[j] -= v * row[j]
    return False


def search(ct, long long m, long long m_eff, bint prune):
    """Mirror of `_bnb_py.search` with the loop compiled."""
    cdef const signed char[:, ::1] ctv = np.ascontiguousarray(ct, dtype=np.int8)
    cdef int L = ctv.shape[0]
    cdef int n = ctv.shape[1]
    cdef long long nodes = 1
    cdef bint found
    cdef int j, l

    c_out = np.zeros(L, dtype=np.int8)
    cdef signed char[::1] cview = c_out
    cview[0] = 1

    cdef long long * s = <long long *> malloc(n * sizeof(long long))
    if s == NULL:
        raise MemoryError
    try:
        for j in range(n):
            s[j] = ctv[0, j]
        with nogil:
            found = _dfs(&ctv[0, 0], s, &cview[0], 1, L, n, m, m_eff, prune, &nodes)
    finally:
        free(s)
    return bool(found), (c_out if found else None), int(nodes)
