"""Directional and parabolic eigenvalue derivatives and their expansions."""

import numpy as np
import pytest

from specvaran import (
    InputError,
    block_structure,
    directional_frame,
    eig_ordered,
    expansion_residual_first,
    expansion_residual_second,
    lambda_dir,
    lambda_parabolic,
    slope_fit,
)
from specvaran.instances import matrix_with_spectrum, random_orthogonal, random_symmetric
from specvaran.symmat import random_block_rotation


class TestLambdaDir:
    def test_simple_spectrum_diagonal(self):
        d = lambda_dir(np.diag([3.0, 1.0]), np.diag([0.5, -0.2]))
        np.testing.assert_allclose(d, [0.5, -0.2], atol=1e-12)

    def test_single_block_at_zero(self):
        d = lambda_dir(np.zeros((2, 2)), np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(d, [1.0, -1.0], atol=1e-12)

    def test_forward_difference_oracle(self, rng):
        lam = np.array([2.0, 2.0, 2.0, 0.5, -1.0, -1.0])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 6)
        t = 1e-6
        fd = (eig_ordered(X + t * H).lam - eig_ordered(X).lam) / t
        np.testing.assert_allclose(lambda_dir(X, H), fd, atol=1e-4)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            lambda_dir(np.eye(2), np.eye(3))


class TestDirectionalFrame:
    def test_diagonal_direction(self):
        f = directional_frame(np.diag([2.0, 2.0]), np.diag([5.0, 1.0]))
        # only the product U Q is canonical under repeated eigenvalues
        UQ = f.eig.U[:, f.blocks.alpha[0]] @ f.Q[0]
        np.testing.assert_allclose(np.abs(UQ), np.eye(2), atol=1e-12)
        np.testing.assert_allclose(f.eta[0], [5.0, 1.0])
        assert [list(b) for b in f.beta[0]] == [[0], [1]]
        np.testing.assert_array_equal(f.ellp, [1, 1])

    def test_offdiagonal_direction(self):
        f = directional_frame(np.diag([2.0, 2.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(np.abs(f.Q[0]), np.full((2, 2), 1 / np.sqrt(2)), atol=1e-12)
        np.testing.assert_allclose(f.eta[0], [1.0, -1.0], atol=1e-12)

    def test_golden_ratio_inner_spectrum(self):
        X = np.diag([1.0, 0.0, 0.0])
        H = np.array([[1.0, 0.0, 0.0], [0.0, 0.5, -0.5], [0.0, -0.5, 0.0]])
        f = directional_frame(X, H)
        np.testing.assert_allclose(
            f.eta[1], [(1 + np.sqrt(5)) / 4, (1 - np.sqrt(5)) / 4], atol=1e-12
        )

    def test_frame_diagonalizes_blocks(self, rng):
        lam = np.array([1.0, 1.0, 1.0, -0.5])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 4)
        f = directional_frame(X, H)
        for m, idx in enumerate(f.blocks.alpha):
            S = f.eig.U[:, idx].T @ H @ f.eig.U[:, idx]
            D = f.Q[m].T @ S @ f.Q[m]
            np.testing.assert_allclose(D, np.diag(np.diag(D)), atol=1e-9)
            assert np.all(np.diff(np.diag(D)) <= 1e-9)


class TestLambdaParabolic:
    def test_two_by_two_closed_form(self):
        # lam_1(X + tH) = 2 + sqrt(1 + t^2) for X = diag(3,1), H offdiagonal
        X = np.diag([3.0, 1.0])
        H = np.array([[0.0, 1.0], [1.0, 0.0]])
        d2 = lambda_parabolic(X, H, np.zeros((2, 2)))
        np.testing.assert_allclose(d2, [1.0, -1.0], atol=1e-12)

    def test_zero_direction_reduces_to_blocks(self):
        d2 = lambda_parabolic(np.diag([3.0, 1.0]), np.zeros((2, 2)), np.diag([4.0, 2.0]))
        np.testing.assert_allclose(d2, [4.0, 2.0], atol=1e-12)

    def test_parabolic_difference_oracle(self, rng):
        lam = np.array([1.5, 1.5, 0.0, -1.0, -1.0])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 5)
        W = random_symmetric(rng, 5)
        t = 1e-4
        quot = (
            eig_ordered(X + t * H + 0.5 * t * t * W).lam
            - eig_ordered(X).lam
            - t * lambda_dir(X, H)
        ) / (0.5 * t * t)
        np.testing.assert_allclose(lambda_parabolic(X, H, W), quot, atol=1e-3)

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            lambda_parabolic(np.eye(2), np.eye(2), np.eye(3))


class TestExpansionResiduals:
    def test_commuting_pair_vanishes(self):
        table = expansion_residual_first(np.diag([3.0, 1.0]), np.eye(2))
        assert np.all(table[:, 1] <= 1e-13)

    def test_homogeneity_at_zero(self, rng):
        H = random_symmetric(rng, 4)
        table = expansion_residual_first(np.zeros((4, 4)), H)
        assert np.all(table[:, 1] <= 1e-12)

    def test_first_order_slope(self, rng):
        lam = np.array([1.0, 1.0, -0.5, -2.0, -2.0, -3.0])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 6)
        table = expansion_residual_first(X, H, t_grid=(1e-1, 1e-2, 1e-3, 1e-4, 1e-5))
        assert slope_fit(table) >= 1.8

    def test_second_order_closed_form(self):
        # residual(t) = sqrt(2) |sqrt(1+t^2) - 1 - t^2/2| = O(t^4)
        X = np.diag([3.0, 1.0])
        H = np.array([[0.0, 1.0], [1.0, 0.0]])
        table = expansion_residual_second(X, H, np.zeros((2, 2)), t_grid=(1e-1, 1e-2))
        for t, res in table:
            expected = np.sqrt(2.0) * abs(np.sqrt(1 + t * t) - 1 - t * t / 2)
            np.testing.assert_allclose(res, expected, atol=1e-12)

    def test_zero_inputs(self):
        table = expansion_residual_second(np.diag([2.0, 1.0]), np.zeros((2, 2)), np.zeros((2, 2)))
        assert np.all(table[:, 1] <= 1e-13)

    def test_second_order_ratio_decreases(self, rng):
        from specvaran.instances import expansion_instance

        X, H, W = expansion_instance(rng, 5, "triple")
        table = expansion_residual_second(X, H, W, t_grid=(1e-1, 1e-2, 1e-3))
        ratios = table[:, 1] / table[:, 0] ** 2
        assert np.all(np.diff(ratios) <= 1e-9)
        assert ratios[-1] < 1e-3

    def test_bad_grid(self):
        with pytest.raises(InputError):
            expansion_residual_first(np.eye(2), np.eye(2), t_grid=(1e-3, 1e-2))


class TestInvariances:
    def test_positive_homogeneity(self, rng):
        lam = np.array([2.0, 2.0, -1.0, -1.0])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 4)
        for s in (0.0, 0.5, 2.0, 7.5):
            np.testing.assert_allclose(lambda_dir(X, s * H), s * lambda_dir(X, H), atol=1e-10)

    def test_nonexpansiveness(self, rng):
        lam = np.array([1.0, 1.0, 0.0, -2.0])
        X = matrix_with_spectrum(rng, lam)
        for _ in range(50):
            H1 = random_symmetric(rng, 4)
            H2 = random_symmetric(rng, 4)
            d = np.linalg.norm(lambda_dir(X, H1) - lambda_dir(X, H2))
            assert d <= np.linalg.norm(H1 - H2) + 1e-9

    def test_orthogonal_invariance(self, rng):
        lam = np.array([1.0, 1.0, -0.5, -0.5, -2.0])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 5)
        W = random_symmetric(rng, 5)
        V = random_orthogonal(rng, 5)
        rot = lambda M: V @ M @ V.T
        np.testing.assert_allclose(lambda_dir(rot(X), rot(H)), lambda_dir(X, H), atol=1e-8)
        np.testing.assert_allclose(
            lambda_parabolic(rot(X), rot(H), rot(W)), lambda_parabolic(X, H, W), atol=1e-8
        )

    def test_frame_independence(self, rng):
        lam = np.array([3.0, 3.0, 3.0, 1.0, 1.0])
        X = matrix_with_spectrum(rng, lam)
        H = random_symmetric(rng, 5)
        W = random_symmetric(rng, 5)
        e = eig_ordered(X)
        blocks = block_structure(e)
        R = random_block_rotation(blocks, rng)
        X2 = ((e.U @ R) * e.lam) @ (e.U @ R).T  # same matrix, rebuilt
        np.testing.assert_allclose(lambda_dir(X2, H), lambda_dir(X, H), atol=1e-8)
        np.testing.assert_allclose(lambda_parabolic(X2, H, W), lambda_parabolic(X, H, W), atol=1e-8)

    def test_trace_consistency(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 8))
            X = random_symmetric(rng, n)
            H = random_symmetric(rng, n)
            assert abs(np.sum(lambda_dir(X, H)) - np.trace(H)) <= 1e-9
