"""Pure-Python twin of the compiled sign-vector search kernel.

Both kernels must visit the same nodes in the same order: depth-first over
c[1..L-1] with c[0] fixed to +1, the +1 branch before the -1 branch. A
node is counted each time an entry is assigned (the root, with c[0]
assigned, counts as one). Pruning drops a branch when some running
correlation can no longer return inside [-m_eff, m_eff]; when a
correlation is exactly at that limit every remaining step is forced, and
only the forced branch is generated.

The caller supplies both the raw bound `m` (used at leaves) and the
parity-adjusted `m_eff` (used for pruning); with `prune=False` the search
is plain exhaustive enumeration under `m`.
"""

from __future__ import annotations

import sys

import numpy as np


def search(ct: np.ndarray, m: int, m_eff: int, prune: bool):
    """Find the first feasible sign vector in lexicographic order.

    ct: (L, n) int8 array, ct[l, j] = entry l of existing column j.
    Returns (found, column int8 array or None, nodes visited).
    """
    L, n = ct.shape
    ctv = ct.astype(np.int64)
    c = np.zeros(L, dtype=np.int8)
    c[0] = 1
    s = ctv[0].copy()
    nodes = 1

    sys.setrecursionlimit(max(sys.getrecursionlimit(), L + 100))

    def dfs(t: int) -> bool:
        nonlocal nodes, s
        if t == L:
            return bool((np.abs(s) <= m).all())
        forced = 0
        if prune:
            lim = m_eff + (L - t)
            a = np.abs(s)
            if (a > lim).any():
                return False
            tight = np.flatnonzero(a == lim)
            if tight.size:
                j = int(tight[0])
                forced = -int(ctv[t, j]) if s[j] > 0 else int(ctv[t, j])
        for v in (forced,) if forced else (1, -1):
            c[t] = v
            s += v * ctv[t]
            nodes += 1
            if dfs(t + 1):
                return True
            s -= v * ctv[t]
        return False

    found = dfs(1)
    return found, (c.copy() if found else None), nodes
