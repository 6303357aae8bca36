"""The seven spreading-matrix constructions.

Two greedy coherence minimizers:

* ``ophm``: start from a square sign matrix cut out of a Sylvester
  Hadamard matrix and delete rows one at a time, each time removing a row
  whose deletion leaves the smallest maximum column correlation (ties
  broken uniformly at random from the seeded generator).
* ``oca``: grow the matrix column by column; each new column is an exact
  solution of the bounded-correlation feasibility problem, with the bound
  m raised only when the solver certifies infeasibility.

And five baselines: ``bernoulli`` (iid signs), ``pm`` (rows of a cyclic
m-sequence matrix), ``cbm`` (thresholded logistic-map iterates), ``phm``
(random rows and columns of a Hadamard matrix), ``bgm`` (rows drawn from
cyclic shifts of a Golay complementary pair).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitmatrix import BipolarMatrix
from .solver import FeasibilityProblem, solve

__all__ = [
    "METHODS",
    "ConstructionSpec",
    "construct",
    "hadamard",
    "construct_bernoulli",
    "construct_pm",
    "construct_cbm",
    "construct_phm",
    "construct_bgm",
    "construct_ophm",
    "construct_oca",
    "ophm_trace",
    "oca_trace",
    "OphmTrace",
    "OcaTrace",
    "m_sequence",
    "golay_pair",
]

METHODS = ("bernoulli", "pm", "cbm", "phm", "bgm", "ophm", "oca")


@dataclass(frozen=True)
class ConstructionSpec:
    """Method name, target shape, and the seed that fixes every random choice."""

    method: str
    rows: int
    cols: int
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.rows > self.cols:
            raise ValueError(f"need rows <= cols, got {self.rows}x{self.cols}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def construct(spec: ConstructionSpec) -> BipolarMatrix:
    """Dispatch to the named construction."""
    return _DISPATCH[spec.method](spec)


# ---------- Hadamard ----------


def hadamard(n: int) -> BipolarMatrix:
    """Sylvester Hadamard matrix of power-of-two order n."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"order must be a power of two, got {n}")
    idx = np.arange(n, dtype=np.uint64)
    parity = np.bitwise_count(idx[:, None] & idx[None, :]).astype(np.int8) & 1
    return BipolarMatrix.from_dense(1 - 2 * parity)


def _next_pow2(n: int) -> int:
    return 1 << max(n - 1, 0).bit_length()


# ---------- baselines ----------


def construct_bernoulli(spec: ConstructionSpec) -> BipolarMatrix:
    rng = np.random.default_rng(spec.seed)
    dense = 2 * rng.integers(0, 2, size=(spec.rows, spec.cols), dtype=np.int8) - 1
    return BipolarMatrix.from_dense(dense)


# Maximal-length shift-register feedback taps, one fixed primitive
# polynomial per register size (exponents of the nonzero terms).
_PRIMITIVE_POLYS = {
    2: (2, 1),
    3: (3, 1),
    4: (4, 1),
    5: (5, 2),
    6: (6, 1),
    7: (7, 3),
}


def m_sequence(n: int) -> np.ndarray:
    """One period (length 2^n - 1) of the maximal-length bit sequence.

    Fibonacci register of n bits seeded all-ones; the output bit is the
    high end of the register, and the feedback XORs the register bits
    indexed by the polynomial exponents (exponent e taps bit e-1).
    """
    if n not in _PRIMITIVE_POLYS:
        raise ValueError(f"no feedback polynomial on file for register size {n}")
    taps = [e - 1 for e in _PRIMITIVE_POLYS[n]]
    reg = [1] * n
    out = []
    for _ in range(2**n - 1):
        out.append(reg[-1])
        fb = 0
        for t in taps:
            fb ^= reg[t]
        reg = [fb] + reg[:-1]
    return np.array(out, dtype=np.uint8)


def construct_pm(spec: ConstructionSpec) -> BipolarMatrix:
    n = 2
    while 2**n - 1 < spec.cols:
        n += 1
    seq = 1 - 2 * m_sequence(n).astype(np.int8)
    N = seq.size
    circulant = np.stack([np.roll(seq, -i) for i in range(N)])
    rng = np.random.default_rng(spec.seed)
    keep = np.sort(rng.choice(N, size=spec.rows, replace=False))
    return BipolarMatrix.from_dense(circulant[keep, : spec.cols])


def construct_cbm(spec: ConstructionSpec) -> BipolarMatrix:
    """Signs of logistic-map iterates: burn in 1000 steps, keep every 5th."""
    rng = np.random.default_rng(spec.seed)
    need = spec.rows * spec.cols
    while True:
        x = rng.uniform()
        samples = np.empty(need)
        ok = True
        k = 0
        for step in range(1000 + 5 * need):
            x = 4.0 * x * (1.0 - x)
            if x in (0.0, 0.5, 0.75, 1.0):  # orbit collapsed, try a new start
                ok = False
                break
            if step >= 1000 and (step - 1000) % 5 == 4:
                samples[k] = x
                k += 1
        if ok:
            break
    signs = np.where(samples > 0.5, 1, -1).astype(np.int8)
    return BipolarMatrix.from_dense(signs.reshape((spec.rows, spec.cols), order="F"))


def construct_phm(spec: ConstructionSpec) -> BipolarMatrix:
    N = _next_pow2(spec.cols)
    dense = hadamard(N).to_dense()
    rng = np.random.default_rng(spec.seed)
    keep_rows = np.sort(rng.choice(N, size=spec.rows, replace=False))
    keep_cols = np.sort(rng.choice(N, size=spec.cols, replace=False))
    return BipolarMatrix.from_dense(dense[np.ix_(keep_rows, keep_cols)])


def golay_pair(length: int) -> tuple[np.ndarray, np.ndarray]:
    """Complementary sign-sequence pair of power-of-two length.

    Built by the doubling recursion a -> a|b, b -> a|-b from a = b = [1];
    the aperiodic autocorrelations of the pair sum to zero at every
    nonzero lag.
    """
    if length < 1 or length & (length - 1):
        raise ValueError(f"length must be a power of two, got {length}")
    a = np.array([1], dtype=np.int8)
    b = np.array([1], dtype=np.int8)
    while a.size < length:
        a, b = np.concatenate([a, b]), np.concatenate([a, -b])
    return a, b


def construct_bgm(spec: ConstructionSpec) -> BipolarMatrix:
    length = _next_pow2(spec.cols)
    a, b = golay_pair(length)
    pool = np.stack(
        [np.roll(a, -i) for i in range(length)] + [np.roll(b, -i) for i in range(length)]
    )
    rng = np.random.default_rng(spec.seed)
    keep = np.sort(rng.choice(2 * length, size=spec.rows, replace=False))
    return BipolarMatrix.from_dense(pool[keep, : spec.cols])


# ---------- greedy row deletion (ophm) ----------


@dataclass(frozen=True)
class OphmTrace:
    """Deletion-order record: per step, the row removed (index at the time
    of deletion) and the post-deletion maximum |column inner product|."""

    matrix: BipolarMatrix
    deleted_rows: list[int]
    step_max_abs_ip: list[int]


def ophm_trace(spec: ConstructionSpec) -> OphmTrace:
    N = _next_pow2(spec.cols)
    dense = hadamard(N).to_dense()[: spec.cols, : spec.cols].astype(np.int64)
    gram = dense.T @ dense
    rng = np.random.default_rng(spec.seed)
    iu = np.triu_indices(spec.cols, 1)
    deleted: list[int] = []
    step_max: list[int] = []
    for _ in range(spec.cols - spec.rows):
        # candidate k: Gram after deleting row k is gram - outer(row_k, row_k)
        downdated = np.abs(gram[None, :, :] - np.einsum("ki,kj->kij", dense, dense))
        cand_max = downdated[:, iu[0], iu[1]].max(axis=1)
        best = cand_max.min()
        ties = np.flatnonzero(cand_max == best)
        pick = int(ties[rng.integers(len(ties))])
        gram -= np.outer(dense[pick], dense[pick])
        dense = np.delete(dense, pick, axis=0)
        deleted.append(pick)
        step_max.append(int(best))
    return OphmTrace(
        matrix=BipolarMatrix.from_dense(dense.astype(np.int8)),
        deleted_rows=deleted,
        step_max_abs_ip=step_max,
    )


def construct_ophm(spec: ConstructionSpec) -> BipolarMatrix:
    return ophm_trace(spec).matrix


# ---------- exact column augmentation (oca) ----------


@dataclass(frozen=True)
class OcaTrace:
    """Growth record: the bound in effect as each column was appended, the
    bounds certified infeasible along the way, and total search nodes."""

    matrix: BipolarMatrix
    m_history: list[int]
    infeasible_bounds: list[int]
    total_nodes: int

    @property
    def final_m(self) -> int:
        return self.m_history[-1]


def oca_trace(spec: ConstructionSpec, *, parity_skip: bool = False) -> OcaTrace:
    L = spec.rows
    columns = [np.ones(L, dtype=np.int8)]
    m = 0
    m_history = [0]
    infeasible: list[int] = []
    total_nodes = 0
    while len(columns) < spec.cols:
        problem = FeasibilityProblem(np.stack(columns), bound=m, dim=L)
        result = solve(problem)
        total_nodes += result.nodes
        if result.feasible:
            columns.append(result.column)
            m_history.append(m)
        else:
            infeasible.append(m)
            if parity_skip:
                # |<c_i, c_j>| always has the parity of L, so bounds of the
                # wrong parity admit nothing new; hop straight over them.
                m += 1 if (L - (m + 1)) % 2 == 0 else 2
            else:
                m += 1
    dense = np.stack(columns, axis=1)
    return OcaTrace(
        matrix=BipolarMatrix.from_dense(dense),
        m_history=m_history,
        infeasible_bounds=infeasible,
        total_nodes=total_nodes,
    )


def construct_oca(spec: ConstructionSpec) -> BipolarMatrix:
    return oca_trace(spec).matrix


_DISPATCH = {
    "bernoulli": construct_bernoulli,
    "pm": construct_pm,
    "cbm": construct_cbm,
    "phm": construct_phm,
    "bgm": construct_bgm,
    "ophm": construct_ophm,
    "oca": construct_oca,
}
