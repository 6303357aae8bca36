"""Exact feasibility solver for bounded-correlation sign vectors.

Given existing +-1 columns and an integer bound m, find c in {+1, -1}^L
with |<c, col_j>| <= m for every j, or certify that none exists. The
search is complete: depth-first over sign assignments with c[0] fixed to
+1 (the constraints are symmetric under global negation), entries assigned
in index order, the +1 branch first, returning the first feasible leaf in
lexicographic order.

Pruning drops a branch as soon as some running correlation s_j cannot be
brought back inside [-m, m] by the remaining entries. Because every final
correlation has the parity of L, the bound is first tightened to the
largest m_eff <= m with m_eff = L (mod 2); this is an exact equivalence,
not a heuristic. When a correlation sits exactly at the pruning limit the
rest of the vector is forced, and only the forced branch is expanded.
None of this changes which leaf is returned.

The hot loop lives in a compiled extension (`_bnb`) with a pure-Python
twin (`_bnb_py`); the import below picks the compiled one when available.
Set BIPSPREAD_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

if os.environ.get("BIPSPREAD_PURE_PYTHON"):
    from . import _bnb_py as _kernel

    _BACKEND = "python"
else:
    try:
        from . import _bnb as _kernel  # type: ignore[attr-defined]

        _BACKEND = "compiled"
    except ImportError:
        from . import _bnb_py as _kernel

        _BACKEND = "python"

__all__ = [
    "FeasibilityProblem",
    "FeasibilityResult",
    "solve",
    "find_feasible_column",
    "count_solver_nodes",
    "backend_name",
]


def backend_name() -> str:
    """Which search kernel is active: 'compiled' or 'python'."""
    return _BACKEND


@dataclass(frozen=True)
class FeasibilityProblem:
    """Existing columns (n, L) as +-1 rows, a bound m, and the dimension L."""

    columns: np.ndarray
    bound: int
    dim: int

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=np.int8)
        if cols.size == 0:
            cols = cols.reshape(0, self.dim)
        if cols.ndim != 2 or cols.shape[1] != self.dim:
            raise ValueError(f"columns must be (n, {self.dim}), got {cols.shape}")
        if not np.isin(cols, (-1, 1)).all():
            raise ValueError("column entries must be exactly +1 or -1")
        if self.bound < 0:
            raise ValueError("bound must be nonnegative")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "columns", cols)


@dataclass(frozen=True)
class FeasibilityResult:
    column: np.ndarray | None
    nodes: int
    degenerate: bool = False

    @property
    def feasible(self) -> bool:
        return self.column is not None


def solve(problem: FeasibilityProblem, *, prune: bool = True) -> FeasibilityResult:
    """Run the search; see the module docstring for the search contract."""
    L, m = problem.dim, problem.bound
    n = problem.columns.shape[0]
    if n == 0:
        return FeasibilityResult(np.ones(L, dtype=np.int8), nodes=1)
    if m >= L:
        # every candidate satisfies |<c, col>| <= L <= m
        return FeasibilityResult(np.ones(L, dtype=np.int8), nodes=1, degenerate=True)
    m_eff = m
    if prune and (L - m) % 2 == 1:
        m_eff = m - 1
        if m_eff < 0:
            # parity: |<c, col>| = L (mod 2) can never be 0 when L is odd
            return FeasibilityResult(None, nodes=1)
    ct = np.ascontiguousarray(problem.columns.T)  # (L, n)
    found, column, nodes = _kernel.search(ct, m, m_eff, prune)
    return FeasibilityResult(column if found else None, nodes=int(nodes))


def find_feasible_column(problem: FeasibilityProblem, *, prune: bool = True):
    """The feasible column, or None when the problem is infeasible."""
    return solve(problem, prune=prune).column


def count_solver_nodes(problem: FeasibilityProblem, *, prune: bool = True) -> int:
    """Nodes visited by the same search (diagnostic)."""
    return solve(problem, prune=prune).nodes
