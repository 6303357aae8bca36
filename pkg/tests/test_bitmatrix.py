import json
import math

import numpy as np
import pytest

from bipspread.bitmatrix import (
    BipolarMatrix,
    coherence,
    delete_row,
    inner_product,
    load_matrix,
    matrix_from_dict,
    matrix_to_dict,
    save_matrix,
    welch_bound,
)
from bipspread.constructors import hadamard


def naive_gram_profile(dense):
    """Reference coherence statistics by direct O(rows * cols^2) summation."""
    rows, cols = dense.shape
    abs_ips = []
    for i in range(cols):
        for j in range(i + 1, cols):
            ip = sum(int(dense[l, i]) * int(dense[l, j]) for l in range(rows))
            abs_ips.append(abs(ip))
    return abs_ips


def random_dense(rng, rows, cols):
    return (2 * rng.integers(0, 2, size=(rows, cols)) - 1).astype(np.int8)


class TestBipolarMatrix:
    def test_pack_unpack_roundtrip(self):
        rng = np.random.default_rng(1)
        for rows, cols in [(1, 1), (5, 9), (15, 24), (64, 10), (65, 7), (130, 3)]:
            dense = random_dense(rng, rows, cols)
            mat = BipolarMatrix.from_dense(dense)
            assert np.array_equal(mat.to_dense(), dense)

    def test_rejects_non_sign_entries(self):
        with pytest.raises(ValueError):
            BipolarMatrix.from_dense(np.array([[1, 0], [1, -1]]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            BipolarMatrix.from_dense(np.zeros((0, 3), dtype=np.int8))

    def test_column_signs_matches_dense(self):
        rng = np.random.default_rng(2)
        dense = random_dense(rng, 70, 5)
        mat = BipolarMatrix.from_dense(dense)
        for j in range(5):
            assert np.array_equal(mat.column_signs(j), dense[:, j])

    def test_equality(self):
        rng = np.random.default_rng(3)
        dense = random_dense(rng, 8, 4)
        assert BipolarMatrix.from_dense(dense) == BipolarMatrix.from_dense(dense)
        flipped = dense.copy()
        flipped[0, 0] *= -1
        assert BipolarMatrix.from_dense(dense) != BipolarMatrix.from_dense(flipped)


class TestInnerProduct:
    def test_identical_vectors(self):
        assert inner_product([1, 1], [1, 1]) == 2

    def test_orthogonal_pair(self):
        assert inner_product([1, 1], [1, -1]) == 0

    def test_direct_summation_example(self):
        assert inner_product([1, 1, 1, 1, -1], [1, -1, 1, -1, 1]) == -1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            inner_product([1, 1], [1, 1, 1])

    def test_popcount_identity_vs_naive(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            n = int(rng.integers(1, 130))
            a = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
            b = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
            naive = int(np.sum(a.astype(int) * b.astype(int)))
            hamming = int(np.sum(a != b))
            assert inner_product(a, b) == naive == n - 2 * hamming

    def test_parity(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(1, 64))
            a = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
            b = (2 * rng.integers(0, 2, n) - 1).astype(np.int8)
            assert (inner_product(a, b) - n) % 2 == 0


# 5x9 sign matrix used as a worked spreading example; its exact profile is
# pinned below from the naive reference.
EXAMPLE_5X9 = np.array(
    [
        [1, 1, 1, 1, -1, 1, -1, 1, -1],
        [1, -1, 1, -1, 1, -1, 1, -1, -1],
        [1, 1, -1, -1, 1, 1, -1, -1, 1],
        [1, -1, -1, 1, 1, -1, 1, 1, -1],
        [-1, 1, 1, 1, -1, -1, -1, -1, 1],
    ],
    dtype=np.int8,
)


class TestCoherence:
    def test_orthogonal_columns(self):
        mat = BipolarMatrix.from_dense(np.array([[1, 1], [1, -1]], dtype=np.int8))
        assert coherence(mat).mu == 0.0

    def test_duplicate_columns(self):
        mat = BipolarMatrix.from_dense(np.array([[1, 1], [1, 1]], dtype=np.int8))
        assert coherence(mat).mu == 1.0

    def test_example_5x9_profile(self):
        mat = BipolarMatrix.from_dense(EXAMPLE_5X9)
        profile = coherence(mat)
        abs_ips = naive_gram_profile(EXAMPLE_5X9)
        assert profile.max_abs_ip == max(abs_ips) == 5
        assert profile.mu == 1.0
        assert profile.mean_abs_coherence == pytest.approx(
            sum(abs_ips) / len(abs_ips) / 5
        )

    def test_matches_naive_reference_on_random_matrices(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            rows = int(rng.integers(2, 40))
            cols = int(rng.integers(2, 12))
            dense = random_dense(rng, rows, cols)
            profile = coherence(BipolarMatrix.from_dense(dense))
            abs_ips = naive_gram_profile(dense)
            assert profile.max_abs_ip == max(abs_ips)
            assert profile.mu == max(abs_ips) / rows
            assert profile.mean_abs_coherence == pytest.approx(
                np.mean(abs_ips) / rows
            )

    def test_histogram_counts_sum_to_pair_count(self):
        rng = np.random.default_rng(7)
        dense = random_dense(rng, 15, 24)
        profile = coherence(BipolarMatrix.from_dense(dense))
        assert profile.pair_count == 24 * 23 // 2

    def test_histogram_last_bin_closed(self):
        mat = BipolarMatrix.from_dense(np.array([[1, 1], [1, 1]], dtype=np.int8))
        profile = coherence(mat)
        assert profile.histogram[-1] == (0.9, 1.0, 1)

    def test_single_column_rejected(self):
        mat = BipolarMatrix.from_dense(np.ones((4, 1), dtype=np.int8))
        with pytest.raises(ValueError):
            coherence(mat)

    def test_negation_symmetry(self):
        rng = np.random.default_rng(8)
        dense = random_dense(rng, 12, 8)
        base = coherence(BipolarMatrix.from_dense(dense))
        flip_col = dense.copy()
        flip_col[:, 3] *= -1
        flip_row = dense.copy()
        flip_row[5, :] *= -1
        for variant in (flip_col, flip_row):
            prof = coherence(BipolarMatrix.from_dense(variant))
            assert prof.max_abs_ip == base.max_abs_ip
            assert prof.mean_abs_coherence == pytest.approx(base.mean_abs_coherence)
            assert prof.histogram == base.histogram


class TestDeleteRow:
    def test_basic(self):
        mat = BipolarMatrix.from_dense(np.array([[1, 1], [1, -1]], dtype=np.int8))
        out = delete_row(mat, 0)
        assert np.array_equal(out.to_dense(), [[1, -1]])

    def test_input_unchanged(self):
        dense = np.array([[1, 1], [1, -1]], dtype=np.int8)
        mat = BipolarMatrix.from_dense(dense)
        delete_row(mat, 1)
        assert np.array_equal(mat.to_dense(), dense)

    def test_any_single_deletion_of_h4_gives_third(self):
        h4 = hadamard(4)
        for k in range(4):
            assert coherence(delete_row(h4, k)).mu == pytest.approx(1 / 3)

    def test_sequential_deletes_match_joint_delete(self):
        rng = np.random.default_rng(9)
        dense = random_dense(rng, 10, 6)
        mat = BipolarMatrix.from_dense(dense)
        # remove original rows 2 and 7: after deleting 2, row 7 shifts to 6
        step = delete_row(delete_row(mat, 2), 6)
        joint = BipolarMatrix.from_dense(np.delete(dense, [2, 7], axis=0))
        assert step == joint

    def test_out_of_range(self):
        mat = BipolarMatrix.from_dense(np.ones((3, 2), dtype=np.int8) * np.int8(1))
        with pytest.raises(ValueError):
            delete_row(mat, 3)
        with pytest.raises(ValueError):
            delete_row(mat, -1)


class TestWelchBound:
    def test_15_24(self):
        assert welch_bound(15, 24) == pytest.approx(math.sqrt(9 / 345))

    def test_25_65(self):
        assert welch_bound(25, 65) == pytest.approx(math.sqrt(40 / 1600))

    def test_square_is_zero(self):
        assert welch_bound(7, 7) == 0.0
        assert welch_bound(9, 4) == 0.0


class TestMatrixFile:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        mat = BipolarMatrix.from_dense(random_dense(rng, 15, 24))
        path = tmp_path / "mat.json"
        save_matrix(mat, path)
        assert load_matrix(path) == mat

    def test_format_shape(self, tmp_path):
        mat = BipolarMatrix.from_dense(np.array([[1, -1], [1, 1], [-1, 1]], dtype=np.int8))
        obj = matrix_to_dict(mat)
        assert obj == {"rows": 3, "cols": 2, "columns": ["++-", "-++"]}
        assert matrix_from_dict(json.loads(json.dumps(obj))) == mat

    def test_rejects_bad_columns(self):
        with pytest.raises(ValueError):
            matrix_from_dict({"rows": 2, "cols": 1, "columns": ["+x"]})
        with pytest.raises(ValueError):
            matrix_from_dict({"rows": 2, "cols": 2, "columns": ["++"]})
        with pytest.raises(ValueError):
            matrix_from_dict({"rows": 2, "cols": 1, "columns": ["+++"]})
