"""Sparse-vector-code transmit and receive chain.

A b-bit message selects one of the first 2^b K-subsets of column indices
(the support of a K-sparse vector); the support is spread through a
bipolar matrix into real chips, pushed through a per-chip fading channel,
and recovered by a multipath matching pursuit over the effective
dictionary. Support indices are 0-based everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitmatrix import BipolarMatrix

__all__ = [
    "SparseCodeParams",
    "ChannelRealization",
    "DecodeError",
    "min_length",
    "sparse_map",
    "sparse_demap",
    "spread",
    "draw_channel",
    "apply_channel",
    "mmp_decode",
]


class DecodeError(Exception):
    """Receiver could not produce a message (counted as a block error)."""


def min_length(bits: int, sparsity: int) -> int:
    """Smallest vector length whose K-subsets can address 2^bits messages.

    Exact integer arithmetic: floor(log2(binomial(L, K))) >= bits.
    """
    if bits < 1 or sparsity < 1:
        raise ValueError("bits and sparsity must be positive")
    length = sparsity
    while math.comb(length, sparsity).bit_length() - 1 < bits:
        length += 1
    return length


@dataclass(frozen=True)
class SparseCodeParams:
    """Code geometry: b message bits, K-sparse support, vector and spread lengths."""

    bits: int
    sparsity: int
    vec_len: int
    spread_len: int

    def __post_init__(self):
        if self.bits < 1 or self.sparsity < 1:
            raise ValueError("bits and sparsity must be positive")
        if self.spread_len > self.vec_len:
            raise ValueError("spread length cannot exceed vector length")
        if math.comb(self.vec_len, self.sparsity).bit_length() - 1 < self.bits:
            raise ValueError(
                f"{self.vec_len} choose {self.sparsity} cannot address {self.bits} bits"
            )

    @property
    def alpha(self) -> float:
        """Spreading normalization; sqrt(K) gives unit mean chip power."""
        return math.sqrt(self.sparsity)


def sparse_map(message: int, params: SparseCodeParams) -> tuple[int, ...]:
    """Message rank -> support, counting K-subsets from the right end.

    Rank 0 occupies the last K positions; the leading nonzero moves left
    only as the rank grows (message 0 -> {L-2, L-1}, message 1 -> {L-3, L-1}
    for K = 2).
    """
    if not 0 <= message < 2**params.bits:
        raise ValueError(f"message {message} out of range for {params.bits} bits")
    r = message
    support = []
    for t in range(params.sparsity, 0, -1):
        p = t - 1
        while math.comb(p + 1, t) <= r:
            p += 1
        support.append(params.vec_len - 1 - p)
        r -= math.comb(p, t)
    return tuple(sorted(support))


def sparse_demap(support, params: SparseCodeParams) -> int:
    """Inverse of `sparse_map`; raises DecodeError outside the codebook."""
    idx = tuple(support)
    if len(idx) != params.sparsity or len(set(idx)) != params.sparsity:
        raise ValueError(f"support must be {params.sparsity} distinct indices")
    if not all(0 <= i < params.vec_len for i in idx):
        raise ValueError("support index out of range")
    positions = sorted(params.vec_len - 1 - i for i in idx)  # ascending, from the right
    rank = sum(math.comb(p, t) for t, p in enumerate(positions, start=1))
    if rank >= 2**params.bits:
        raise DecodeError(f"support {idx} lies outside the {params.bits}-bit codebook")
    return rank


def spread(support, mat: BipolarMatrix, params: SparseCodeParams) -> np.ndarray:
    """Chips: the selected columns summed and scaled by 1/alpha."""
    if mat.rows != params.spread_len or mat.cols != params.vec_len:
        raise ValueError(
            f"matrix {mat.rows}x{mat.cols} does not match params "
            f"{params.spread_len}x{params.vec_len}"
        )
    idx = list(support)
    return mat.to_dense()[:, idx].sum(axis=1) / params.alpha


@dataclass(frozen=True)
class ChannelRealization:
    """Per-chip complex gains plus the noise variance for one trial."""

    gains: np.ndarray
    noise_variance: float
    kind: str

    def __post_init__(self):
        if self.kind not in ("awgn", "rayleigh"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.noise_variance < 0:
            raise ValueError("noise variance must be nonnegative")


def draw_channel(kind: str, spread_len: int, noise_variance: float, rng) -> ChannelRealization:
    """awgn: unit gains. rayleigh: iid circular complex Gaussian, unit variance."""
    if kind == "awgn":
        gains = np.ones(spread_len, dtype=np.complex128)
    elif kind == "rayleigh":
        gains = (rng.standard_normal(spread_len) + 1j * rng.standard_normal(spread_len)) / math.sqrt(2)
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return ChannelRealization(gains=gains, noise_variance=float(noise_variance), kind=kind)


def apply_channel(x: np.ndarray, realization: ChannelRealization, rng) -> np.ndarray:
    """y = gains * x + n with n iid circular complex Gaussian."""
    if x.shape != realization.gains.shape:
        raise ValueError("chip vector and gain vector lengths differ")
    scale = math.sqrt(realization.noise_variance / 2.0)
    noise = scale * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
    return realization.gains * x + noise


def _path_fit(phi: np.ndarray, y: np.ndarray, idx: tuple[int, ...]):
    """Least-squares fit of y on the unit-norm dictionary columns `idx`.

    Returns (residual, energy), or None when the columns are linearly
    dependent (the path is dropped).
    """
    sub = phi[:, list(idx)]
    t = len(idx)
    if t == 1:
        coef = sub[:, 0].conj() @ y
        resid = y - coef * sub[:, 0]
    elif t == 2:
        g = sub[:, 0].conj() @ sub[:, 1]
        det = 1.0 - abs(g) ** 2  # unit-norm columns
        if det <= 1e-12:
            return None
        b0 = sub[:, 0].conj() @ y
        b1 = sub[:, 1].conj() @ y
        c0 = (b0 - g * b1) / det
        c1 = (b1 - np.conj(g) * b0) / det
        resid = y - sub[:, 0] * c0 - sub[:, 1] * c1
    else:
        coef, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
        if rank < t:
            return None
        resid = y - sub @ coef
    return resid, float(np.real(resid.conj() @ resid))


def _top_indices(scores: np.ndarray, forbidden, count: int) -> list[int]:
    """Highest scores first, lowest index on ties, skipping `forbidden`."""
    order = np.lexsort((np.arange(scores.size), -scores))
    picked = []
    for i in order:
        if int(i) in forbidden:
            continue
        picked.append(int(i))
        if len(picked) == count:
            break
    return picked


def mmp_decode(
    y: np.ndarray,
    gains: np.ndarray,
    mat: BipolarMatrix,
    params: SparseCodeParams,
    branches: int = 2,
) -> tuple[int, ...]:
    """Multipath matching pursuit support detection with known gains.

    Depth-K tree search over the effective dictionary whose columns are
    gains * C[:, i], normalized. Each surviving path expands its
    `branches` best extensions by residual correlation; duplicate index
    sets merge; the winner minimizes residual energy (ties go to the
    lexicographically smallest support). With branches = 1 this is plain
    orthogonal matching pursuit.
    """
    if branches < 1:
        raise ValueError("branches must be positive")
    if mat.rows != params.spread_len or mat.cols != params.vec_len:
        raise ValueError("matrix shape does not match code parameters")
    phi = gains[:, None] * mat.to_dense()
    norms = np.linalg.norm(phi, axis=0)
    norms[norms == 0] = 1.0  # all-zero column: correlation stays 0
    phi = phi / norms

    paths: dict[tuple[int, ...], tuple[np.ndarray, float]] = {
        (): (y.astype(np.complex128), float(np.real(y.conj() @ y)))
    }
    for _ in range(params.sparsity):
        children: dict[tuple[int, ...], tuple[np.ndarray, float] | None] = {}
        for idx, (resid, _) in paths.items():
            corr = np.abs(phi.conj().T @ resid)
            for pick in _top_indices(corr, set(idx), branches):
                child = tuple(sorted(idx + (pick,)))
                if child not in children:
                    children[child] = _path_fit(phi, y, child)
        paths = {idx: fit for idx, fit in children.items() if fit is not None}
        if not paths:
            raise DecodeError("all search paths were rank-deficient")
    return min(paths, key=lambda idx: (paths[idx][1], idx))
