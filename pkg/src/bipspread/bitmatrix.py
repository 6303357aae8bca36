"""Bit-packed bipolar matrices and their column-coherence profiles.

A bipolar matrix has entries in {+1, -1}. Columns are the unit of storage
and are kept bit-packed (bit = 1 encodes +1, LSB-first inside 64-bit
words), so a column inner product is one XOR plus a popcount. All
coherence bookkeeping stays in exact integers; division by the row count
happens only when a profile is reported.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BipolarMatrix",
    "GramProfile",
    "inner_product",
    "coherence",
    "delete_row",
    "welch_bound",
    "load_matrix",
    "save_matrix",
]

_WORD_BITS = 64


def _pack_columns(dense: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) sign matrix into (cols, n_words) uint64 words."""
    rows, cols = dense.shape
    bits = (dense.T > 0).astype(np.uint64)  # (cols, rows)
    pad = (-rows) % _WORD_BITS
    if pad:
        bits = np.pad(bits, ((0, 0), (0, pad)))
    shifts = np.arange(_WORD_BITS, dtype=np.uint64)
    words = (bits.reshape(cols, -1, _WORD_BITS) << shifts).sum(axis=2, dtype=np.uint64)
    return np.ascontiguousarray(words)


class BipolarMatrix:
    """Immutable rows x cols matrix over {+1, -1} with bit-packed columns."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        if rows < 1 or cols < 1:
            raise ValueError(f"matrix must be at least 1x1, got {rows}x{cols}")
        n_words = -(-rows // _WORD_BITS)
        words = np.asarray(words, dtype=np.uint64)
        if words.shape != (cols, n_words):
            raise ValueError(f"packed data shape {words.shape} != {(cols, n_words)}")
        tail = rows % _WORD_BITS
        if tail and (words[:, -1] >> np.uint64(tail)).any():
            raise ValueError("stray bits beyond the last row")
        words = words.copy()
        words.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self.words = words

    @classmethod
    def from_dense(cls, dense) -> "BipolarMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("expected a 2-D array of signs")
        if not np.isin(dense, (-1, 1)).all():
            raise ValueError("entries must be exactly +1 or -1")
        rows, cols = dense.shape
        return cls(rows, cols, _pack_columns(dense.astype(np.int8)))

    def to_dense(self) -> np.ndarray:
        """Unpack to a (rows, cols) int8 array of +-1."""
        idx = np.arange(self.rows, dtype=np.uint64)
        w = self.words[:, (idx // _WORD_BITS).astype(np.intp)]  # (cols, rows)
        bits = (w >> (idx % _WORD_BITS)) & np.uint64(1)
        return (2 * bits.astype(np.int8) - 1).T.copy()

    def column_signs(self, j: int) -> np.ndarray:
        if not 0 <= j < self.cols:
            raise ValueError(f"column {j} out of range for {self.cols} columns")
        idx = np.arange(self.rows, dtype=np.uint64)
        bits = (self.words[j, (idx // _WORD_BITS).astype(np.intp)] >> (idx % _WORD_BITS)) & np.uint64(1)
        return (2 * bits.astype(np.int8) - 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipolarMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.words, other.words)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self):
        return f"BipolarMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class GramProfile:
    """Off-diagonal statistics of the (unnormalized) Gram matrix.

    `max_abs_ip` is the exact integer max |<c_i, c_j>| over unordered column
    pairs; `mu` and `mean_abs_coherence` are the same statistics divided by
    the row count. The histogram covers normalized magnitudes with
    half-open bins [lo, hi), last bin closed.
    """

    max_abs_ip: int
    mu: float
    mean_abs_coherence: float
    histogram: list[tuple[float, float, int]]

    @property
    def pair_count(self) -> int:
        return sum(count for _, _, count in self.histogram)


def inner_product(a, b) -> int:
    """Exact integer inner product of two sign vectors of equal length."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if not (np.isin(a, (-1, 1)).all() and np.isin(b, (-1, 1)).all()):
        raise ValueError("entries must be exactly +1 or -1")
    wa = _pack_columns(a.reshape(-1, 1).astype(np.int8))[0]
    wb = _pack_columns(b.reshape(-1, 1).astype(np.int8))[0]
    dist = int(np.bitwise_count(wa ^ wb).sum())
    return a.size - 2 * dist


def _pair_abs_ips(mat: BipolarMatrix) -> np.ndarray:
    """|<c_i, c_j>| over all unordered column pairs, via XOR + popcount."""
    w = mat.words
    xor = w[:, None, :] ^ w[None, :, :]
    dist = np.bitwise_count(xor).sum(axis=2, dtype=np.int64)
    ips = mat.rows - 2 * dist
    iu = np.triu_indices(mat.cols, 1)
    return np.abs(ips[iu])


def coherence(mat: BipolarMatrix, bins: int = 10) -> GramProfile:
    """Gram profile of a matrix with at least two columns."""
    if mat.cols < 2:
        raise ValueError("coherence needs at least 2 columns")
    if bins < 1:
        raise ValueError("bins must be positive")
    abs_ips = _pair_abs_ips(mat)
    normalized = abs_ips / mat.rows
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts, _ = np.histogram(normalized, bins=edges)
    hist = [
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins)
    ]
    return GramProfile(
        max_abs_ip=int(abs_ips.max()),
        mu=int(abs_ips.max()) / mat.rows,
        mean_abs_coherence=float(normalized.mean()),
        histogram=hist,
    )


def delete_row(mat: BipolarMatrix, k: int) -> BipolarMatrix:
    """Copy of `mat` with row k (0-based) removed."""
    if mat.rows < 2:
        raise ValueError("cannot delete the only row")
    if not 0 <= k < mat.rows:
        raise ValueError(f"row {k} out of range for {mat.rows} rows")
    return BipolarMatrix.from_dense(np.delete(mat.to_dense(), k, axis=0))


def welch_bound(rows: int, cols: int) -> float:
    """Coherence lower bound for cols unit-norm vectors in `rows` dimensions."""
    if rows < 1 or cols < 1:
        raise ValueError("rows and cols must be positive")
    if cols <= rows:
        return 0.0
    return math.sqrt((cols - rows) / (rows * (cols - 1)))


# ---------- matrix file format ----------
#
# JSON object {"rows": int, "cols": int, "columns": [str, ...]} where each
# string has one character per row over {"+", "-"}; character l of string j
# is the sign of entry (l, j). Round-trips exactly.


def matrix_to_dict(mat: BipolarMatrix) -> dict:
    dense = mat.to_dense()
    columns = [
        "".join("+" if dense[l, j] > 0 else "-" for l in range(mat.rows))
        for j in range(mat.cols)
    ]
    return {"rows": mat.rows, "cols": mat.cols, "columns": columns}


def matrix_from_dict(obj: dict) -> BipolarMatrix:
    try:
        rows, cols, columns = obj["rows"], obj["cols"], obj["columns"]
    except (TypeError, KeyError) as exc:
        raise ValueError("matrix object needs keys rows, cols, columns") from exc
    if not (isinstance(rows, int) and isinstance(cols, int)):
        raise ValueError("rows and cols must be integers")
    if len(columns) != cols:
        raise ValueError(f"expected {cols} column strings, got {len(columns)}")
    dense = np.empty((rows, cols), dtype=np.int8)
    for j, text in enumerate(columns):
        if len(text) != rows or set(text) - {"+", "-"}:
            raise ValueError(f"column {j} is not a length-{rows} string over +/-")
        dense[:, j] = [1 if ch == "+" else -1 for ch in text]
    return BipolarMatrix.from_dense(dense)


def save_matrix(mat: BipolarMatrix, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(matrix_to_dict(mat), fh, indent=1)
        fh.write("\n")


def load_matrix(path) -> BipolarMatrix:
    with open(path, "r", encoding="ascii") as fh:
        return matrix_from_dict(json.load(fh))
