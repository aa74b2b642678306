"""Core symmetric-matrix operations: ordered spectra, blocks, trace gaps."""

import json

import numpy as np
import pytest

from specvaran import (
    InputError,
    as_symmetric,
    block_structure,
    eig_ordered,
    fan_gap,
    load_matrix,
    shifted_pseudoinverse,
    simultaneous_ordered_frame,
)
from specvaran.instances import matrix_with_spectrum, random_symmetric
from specvaran.symmat import random_block_rotation


class TestEigOrdered:
    def test_diagonal_swap(self):
        e = eig_ordered(np.diag([1.0, 3.0]))
        np.testing.assert_allclose(e.lam, [3.0, 1.0])
        # eigenvectors are the swapped coordinate axes up to sign
        np.testing.assert_allclose(np.abs(e.U), [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)

    def test_identity(self):
        e = eig_ordered(np.eye(3))
        np.testing.assert_allclose(e.lam, np.ones(3))
        np.testing.assert_allclose(e.U.T @ e.U, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(e.reconstruct(), np.eye(3), atol=1e-12)

    def test_offdiagonal_two_by_two(self):
        e = eig_ordered(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(e.lam, [1.0, -1.0], atol=1e-12)

    def test_nonfinite_rejected(self):
        with pytest.raises(InputError):
            eig_ordered(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_nonsquare_rejected(self):
        with pytest.raises(InputError):
            as_symmetric(np.zeros((2, 3)))

    def test_reconstruction_random(self, rng):
        for n in range(1, 13):
            X = random_symmetric(rng, n, scale=rng.uniform(0.1, 5.0))
            e = eig_ordered(X)
            assert np.all(np.diff(e.lam) <= 1e-12)
            err = np.linalg.norm(e.reconstruct() - X)
            assert err <= 1e-8 * (1.0 + np.linalg.norm(X))
            assert np.linalg.norm(e.U.T @ e.U - np.eye(n)) <= 1e-10 * n


class TestBlockStructure:
    def test_distinct(self):
        b = block_structure(np.array([3.0, 1.0]), 1e-8)
        assert b.r == 2
        assert [list(a) for a in b.alpha] == [[0], [1]]
        np.testing.assert_array_equal(b.ell, [1, 1])

    def test_forced_double(self):
        b = block_structure(np.array([2.0, 2.0, 0.0]), 1e-8)
        assert b.r == 2
        assert [list(a) for a in b.alpha] == [[0, 1], [2]]
        np.testing.assert_array_equal(b.ell, [1, 2, 1])
        np.testing.assert_allclose(b.mu, [2.0, 0.0])

    def test_near_tie_clusters(self):
        b = block_structure(np.array([1.0, 1.0 + 5e-9, 0.0]), 1e-8)
        assert b.r == 2
        assert list(b.alpha[0]) == [0, 1]

    def test_negative_tol_rejected(self):
        with pytest.raises(InputError):
            block_structure(np.array([1.0, 0.0]), -1.0)


class TestShiftedPseudoinverse:
    def test_diagonal(self):
        P = shifted_pseudoinverse(np.diag([3.0, 1.0]), 3.0)
        np.testing.assert_allclose(P, np.diag([0.0, 0.5]), atol=1e-12)

    def test_zero_shift(self):
        P = shifted_pseudoinverse(np.diag([1.0, 0.0, 0.0]), 0.0)
        np.testing.assert_allclose(P, np.diag([-1.0, 0.0, 0.0]), atol=1e-12)

    def test_moore_penrose_axioms(self):
        X = np.array([[0.0, 1.0], [1.0, 0.0]])
        A = 1.0 * np.eye(2) - X
        P = shifted_pseudoinverse(X, 1.0)
        np.testing.assert_allclose(A @ P @ A, A, atol=1e-10)
        np.testing.assert_allclose(P @ A @ P, P, atol=1e-10)

    def test_bad_rank_tol(self):
        with pytest.raises(InputError):
            shifted_pseudoinverse(np.eye(2), 0.0, rank_tol=0.0)


class TestFanGap:
    def test_aligned_identity(self):
        g = fan_gap(np.eye(2), np.eye(2))
        assert (g.inner, g.lam_inner, g.gap) == (2.0, 2.0, 0.0)

    def test_misaligned_diagonal(self):
        g = fan_gap(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        np.testing.assert_allclose([g.inner, g.lam_inner, g.gap], [0.0, 1.0, 1.0])

    def test_golden_ratio_block(self):
        A = np.diag([0.0, -1.0])
        B = np.array([[0.5, -0.5], [-0.5, 0.0]])
        g = fan_gap(A, B)
        assert abs(g.inner) <= 1e-12
        target = (np.sqrt(5.0) - 1.0) / 4.0
        np.testing.assert_allclose(g.gap, target, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            fan_gap(np.eye(2), np.eye(3))

    def test_nonnegative_random(self, rng):
        for _ in range(300):
            n = int(rng.integers(1, 8))
            X = random_symmetric(rng, n, scale=rng.uniform(0.1, 3.0))
            Y = random_symmetric(rng, n, scale=rng.uniform(0.1, 3.0))
            g = fan_gap(X, Y)
            scale = 1.0 + np.linalg.norm(X) * np.linalg.norm(Y)
            assert g.gap >= -1e-9 * scale

    def test_eigenvalue_lipschitz(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 9))
            X = random_symmetric(rng, n)
            Y = random_symmetric(rng, n)
            dl = np.linalg.norm(eig_ordered(X).lam - eig_ordered(Y).lam)
            assert dl <= np.linalg.norm(X - Y) + 1e-9


class TestSimultaneousOrderedFrame:
    def test_already_aligned(self):
        f = simultaneous_ordered_frame(np.diag([2.0, 1.0]), np.diag([5.0, 3.0]))
        assert f is not None
        np.testing.assert_allclose(f.lam_x, [2.0, 1.0])
        np.testing.assert_allclose(f.lam_y, [5.0, 3.0])

    def test_psd_cone_pair(self):
        f = simultaneous_ordered_frame(np.diag([1.0, 0.0, 0.0]), np.diag([0.0, 0.0, -1.0]))
        assert f is not None
        np.testing.assert_allclose(f.lam_y, [0.0, 0.0, -1.0])

    def test_misaligned_absent(self):
        assert simultaneous_ordered_frame(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) is None

    def test_frame_diagonalizes_both(self, rng):
        lam_x = np.array([3.0, 3.0, 1.0, -2.0])
        X = matrix_with_spectrum(rng, lam_x)
        e = eig_ordered(X)
        # any nonincreasing function of the eigenvalues shares the order
        lam_y = np.array([2.0, 2.0, 0.5, 0.0])
        Y = (e.U * lam_y) @ e.U.T
        f = simultaneous_ordered_frame(X, Y)
        assert f is not None
        np.testing.assert_allclose(f.U.T @ X @ f.U, np.diag(f.lam_x), atol=1e-9)
        np.testing.assert_allclose(f.U.T @ Y @ f.U, np.diag(f.lam_y), atol=1e-9)

    def test_presence_matches_gap(self, rng):
        hits = 0
        for trial in range(300):
            n = int(rng.integers(2, 7))
            kind = trial % 3
            lam = np.sort(rng.uniform(-2, 2, n))[::-1]
            for i in range(1, n):
                lam[i] = min(lam[i], lam[i - 1] - 0.4)
            X = matrix_with_spectrum(rng, lam)
            e = eig_ordered(X)
            if kind == 0:  # aligned commuting
                ly = np.sort(rng.uniform(-1, 1, n))[::-1]
                Y = (e.U * ly) @ e.U.T
            elif kind == 1:  # commuting but order-breaking
                ly = np.sort(rng.uniform(-1, 1, n))[::-1]
                for i in range(1, n):
                    ly[i] = min(ly[i], ly[i - 1] - 0.4)
                perm = np.roll(np.arange(n), 1)
                Y = (e.U * ly[perm]) @ e.U.T
            else:  # generic non-commuting
                Y = random_symmetric(rng, n)
            present = simultaneous_ordered_frame(X, Y) is not None
            gap_small = fan_gap(X, Y).gap <= 1e-6 * (1.0 + np.linalg.norm(X) * np.linalg.norm(Y))
            assert present == gap_small
            hits += int(present)
        assert 0 < hits < 300  # both branches exercised


class TestMatrixFile:
    def test_roundtrip_and_asymmetry(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"n": 2, "rows": [[1.0, 2.0], [0.0, 3.0]]}))
        loaded = load_matrix(str(path))
        np.testing.assert_allclose(loaded.matrix, [[1.0, 1.0], [1.0, 3.0]])
        np.testing.assert_allclose(loaded.asymmetry, np.sqrt(2.0))

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            load_matrix({"n": 3, "rows": [[1.0, 0.0], [0.0, 1.0]]})

    def test_missing_keys(self):
        with pytest.raises(InputError):
            load_matrix({"rows": [[1.0]]})


def test_block_rotation_preserves_matrix(rng):
    lam = np.array([2.0, 2.0, 2.0, -1.0, -1.0])
    X = matrix_with_spectrum(rng, lam)
    e = eig_ordered(X)
    blocks = block_structure(e)
    R = random_block_rotation(blocks, rng)
    U2 = e.U @ R
    np.testing.assert_allclose((U2 * e.lam) @ U2.T, X, atol=1e-9)
