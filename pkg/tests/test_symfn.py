"""Closed-form hooks of the built-in symmetric functions."""

import numpy as np
import pytest

from specvaran import (
    CapabilityError,
    DomainError,
    InputError,
    QuotientGrid,
    by_name,
    numeric_parabolic_subderivative,
    numeric_second_subderivative,
    numeric_subderivative,
    project_simplex,
    theta_critical_cone_contains,
    theta_domain_distance,
    theta_eval,
    theta_parabolic_subderivative,
    theta_second_subderivative,
    theta_subderivative,
    theta_subdifferential_contains,
)

INF = float("inf")


class TestEval:
    def test_indicator_inside(self):
        assert theta_eval(by_name("neg-orthant"), [-1.0, 0.0]) == 0.0

    def test_indicator_outside(self):
        assert theta_eval(by_name("neg-orthant"), [0.1, -1.0]) == INF

    def test_max(self):
        assert theta_eval(by_name("max"), [2.0, 5.0, -1.0]) == 5.0

    def test_pos_orthant(self):
        assert theta_eval(by_name("pos-orthant"), [0.0, 2.0]) == 0.0
        assert theta_eval(by_name("pos-orthant"), [-0.1, 2.0]) == INF

    def test_spectahedron(self):
        f = by_name("spectahedron:1")
        assert theta_eval(f, [0.25, 0.75]) == 0.0
        assert theta_eval(f, [0.5, 0.75]) == INF
        f2 = by_name("spectahedron:2")
        assert theta_eval(f2, [0.6, 0.8]) == 0.0

    def test_unknown_name(self):
        with pytest.raises(InputError):
            by_name("frobnicate")


class TestSubderivative:
    def test_neg_orthant_tangent(self):
        f = by_name("neg-orthant")
        assert theta_subderivative(f, [0.0, -1.0], [-2.0, 7.0]) == 0.0

    def test_neg_orthant_blocked(self):
        f = by_name("neg-orthant")
        assert theta_subderivative(f, [0.0, -1.0], [1.0, 0.0]) == INF

    def test_max_active_set(self):
        assert theta_subderivative(by_name("max"), [0.0, 0.0], [3.0, -1.0]) == 3.0

    def test_outside_domain_raises(self):
        with pytest.raises(DomainError):
            theta_subderivative(by_name("neg-orthant"), [1.0, 0.0], [0.0, 0.0])

    def test_spectahedron_tangent(self):
        f = by_name("spectahedron:1")
        assert theta_subderivative(f, [1.0, 0.0], [-1.0, 1.0]) == 0.0
        assert theta_subderivative(f, [1.0, 0.0], [1.0, 0.0]) == INF  # breaks the sum
        assert theta_subderivative(f, [1.0, 0.0], [1.0, -1.0]) == INF  # active sign


class TestSubdifferential:
    def test_neg_orthant_complementarity(self):
        f = by_name("neg-orthant")
        assert theta_subdifferential_contains(f, [0.0, -1.0], [2.0, 0.0])
        assert not theta_subdifferential_contains(f, [0.0, -1.0], [2.0, 1.0])
        assert not theta_subdifferential_contains(f, [0.0, -1.0], [-2.0, 0.0])

    def test_max_simplex(self):
        f = by_name("max")
        assert theta_subdifferential_contains(f, [0.0, 0.0], [0.3, 0.7])
        assert not theta_subdifferential_contains(f, [1.0, 0.0], [0.5, 0.5])
        assert not theta_subdifferential_contains(f, [0.0, 0.0], [0.3, 0.3])

    def test_spectahedron_multipliers(self):
        f = by_name("spectahedron:1")
        # v = a*1 + b with b <= 0 on the active set
        assert theta_subdifferential_contains(f, [0.6, 0.4, 0.0], [1.0, 1.0, 0.5])
        assert theta_subdifferential_contains(f, [0.6, 0.4, 0.0], [1.0, 1.0, 1.0])
        assert not theta_subdifferential_contains(f, [0.6, 0.4, 0.0], [1.0, 2.0, 0.0])
        assert not theta_subdifferential_contains(f, [0.6, 0.4, 0.0], [1.0, 1.0, 1.5])

    def test_nonconvex_rejected(self):
        with pytest.raises(CapabilityError):
            theta_subdifferential_contains(by_name("spectahedron:2"), [1.0, 0.0], [1.0, 0.0])


class TestSecondSubderivative:
    def test_neg_orthant_critical(self):
        f = by_name("neg-orthant")
        assert theta_second_subderivative(f, [0.0, -1.0], [2.0, 0.0], [0.0, 4.0]) == 0.0

    def test_neg_orthant_tilted_out(self):
        f = by_name("neg-orthant")
        assert theta_second_subderivative(f, [0.0, -1.0], [2.0, 0.0], [-1.0, 0.0]) == INF

    def test_max_second_level(self):
        f = by_name("max")
        assert theta_second_subderivative(f, [0.0, 0.0], [1.0, 0.0], [2.0, 2.0]) == 0.0
        assert theta_second_subderivative(f, [0.0, 0.0], [1.0, 0.0], [1.0, 2.0]) == INF

    def test_spectahedron_power_two_rejected(self):
        with pytest.raises(CapabilityError):
            by_name("spectahedron:2").second_subderivative([0.6, 0.8], [0.0, 0.0], [0.0, 0.0])


class TestParabolicSubderivative:
    def test_neg_orthant_second_tangent(self):
        f = by_name("neg-orthant")
        assert theta_parabolic_subderivative(f, [0.0, -1.0], [0.0, 1.0], [-3.0, 0.0]) == 0.0
        assert theta_parabolic_subderivative(f, [0.0, -1.0], [0.0, 1.0], [1.0, 0.0]) == INF

    def test_max_second_active(self):
        f = by_name("max")
        for a, b in [(2.0, -1.0), (-3.0, 4.0), (0.0, 0.0)]:
            assert theta_parabolic_subderivative(f, [0.0, 0.0], [1.0, 1.0], [a, b]) == max(a, b)

    def test_spectahedron_power_two(self):
        f = by_name("spectahedron:2")
        x = np.array([1.0, 0.0])
        w = np.array([0.0, 1.0])  # sum x*w = 0, active component >= 0
        assert f.subderivative(x, w) == 0.0
        # second-order: x_1 z_1 + (k-1)(w_1^2 + w_2^2) = z_1 + 1 = 0, z_2 free sign >= 0 when w_2 = 0
        assert f.parabolic_subderivative(x, w, [-1.0, 5.0]) == 0.0
        assert f.parabolic_subderivative(x, w, [0.0, 5.0]) == INF


class TestCriticalCone:
    def test_neg_orthant(self):
        f = by_name("neg-orthant")
        assert theta_critical_cone_contains(f, [0.0, -1.0], [2.0, 0.0], [0.0, 5.0])
        assert theta_critical_cone_contains(f, [0.0, -1.0], [0.0, 0.0], [-1.0, 3.0])
        assert not theta_critical_cone_contains(f, [0.0, -1.0], [2.0, 0.0], [-1.0, 0.0])

    def test_max(self):
        f = by_name("max")
        assert not theta_critical_cone_contains(f, [0.0, 0.0], [1.0, 0.0], [1.0, 2.0])
        assert theta_critical_cone_contains(f, [0.0, 0.0], [1.0, 0.0], [2.0, 1.0])


class TestDomainDistance:
    def test_neg_orthant(self):
        f = by_name("neg-orthant")
        assert theta_domain_distance(f, [1.0, -2.0]) == 1.0
        assert theta_domain_distance(f, [-1.0, -2.0]) == 0.0

    def test_max_everywhere_finite(self):
        assert theta_domain_distance(by_name("max"), [4.0, -7.0]) == 0.0

    def test_simplex_projection_distance(self):
        f = by_name("spectahedron:1")
        np.testing.assert_allclose(theta_domain_distance(f, [2.0, 0.0]), 1.0, atol=1e-12)

    def test_power_two_distance_matches_exhaustive(self, rng):
        f = by_name("spectahedron:2")
        # brute force over a fine parameterization of the quarter circle
        ts = np.linspace(0.0, np.pi / 2, 20001)
        circle = np.stack([np.cos(ts), np.sin(ts)], axis=1)
        for _ in range(10):
            x = rng.uniform(-1.5, 2.5, size=2)
            brute = float(np.min(np.linalg.norm(circle - x, axis=1)))
            np.testing.assert_allclose(f.domain_distance(x), brute, atol=1e-5)

    def test_prox_capabilities(self):
        np.testing.assert_allclose(by_name("spectahedron:1").prox([2.0, 0.0], 1.0), [1.0, 0.0])
        with pytest.raises(CapabilityError):
            by_name("spectahedron:2").prox([1.0, 0.0], 1.0)


class TestSimplexProjection:
    def test_known_values(self):
        np.testing.assert_allclose(project_simplex([2.0, 0.0]), [1.0, 0.0], atol=1e-14)
        np.testing.assert_allclose(project_simplex([0.5, 0.5]), [0.5, 0.5], atol=1e-14)
        np.testing.assert_allclose(project_simplex([-1.0, -1.0]), [0.5, 0.5], atol=1e-14)

    def test_projection_optimality(self, rng):
        for _ in range(50):
            x = rng.normal(size=5) * 2
            p = project_simplex(x)
            assert abs(np.sum(p) - 1.0) <= 1e-12 and np.all(p >= -1e-14)
            for _ in range(10):
                q = project_simplex(x + rng.normal(size=5))  # arbitrary feasible point
                assert np.linalg.norm(x - p) <= np.linalg.norm(x - q) + 1e-10


class TestPermutationSymmetry:
    def test_value_hooks_permutation_invariant(self, rng):
        for name in ("neg-orthant", "pos-orthant", "max", "spectahedron:1", "spectahedron:2"):
            f = by_name(name)
            for _ in range(20):
                x = -np.abs(rng.normal(size=4)) if "neg" in name else np.abs(rng.normal(size=4))
                if name.startswith("spectahedron"):
                    x = np.abs(rng.normal(size=4))
                    x /= np.sum(x**f.k) ** (1.0 / f.k)
                if name == "max":
                    x = rng.normal(size=4)
                perm = rng.permutation(4)
                assert f.value(x) == f.value(x[perm])
                w = rng.normal(size=4)
                assert f.subderivative(x, w) == f.subderivative(x[perm], w[perm])

    def test_subderivative_block_symmetry(self, rng):
        # invariance only under permutations preserving the base point
        f = by_name("neg-orthant")
        x = np.array([0.0, 0.0, -1.0, -1.0])
        for _ in range(20):
            w = rng.normal(size=4)
            q = np.concatenate([rng.permutation(2), 2 + rng.permutation(2)])
            assert f.subderivative(x, w) == f.subderivative(x, w[q])

    def test_parabolic_two_level_symmetry(self, rng):
        # invariance under permutations preserving both x and w levelwise
        f = by_name("neg-orthant")
        x = np.array([0.0, 0.0, 0.0, -1.0])
        w = np.array([0.0, 0.0, -1.0, 0.5])
        for _ in range(20):
            z = rng.normal(size=4)
            q = np.concatenate([rng.permutation(2), [2, 3]])
            assert f.parabolic_subderivative(x, w, z) == f.parabolic_subderivative(x, w, z[q])


class TestOracleAgreement:
    """Vector-level closed forms against the sampling oracles."""

    def test_subderivative_max(self, rng):
        f = by_name("max")
        grid = QuotientGrid.geometric(1e-1, 1e-4, samples=48, seed=3)
        for _ in range(15):
            x = rng.normal(size=4)
            w = rng.normal(size=4)
            closed = f.subderivative(x, w)
            est = numeric_subderivative(f.value, x, w, grid).value
            assert abs(closed - est) <= max(1e-3, 0.02 * abs(closed))

    def test_subderivative_orthants(self, rng):
        grid = QuotientGrid.geometric(1e-1, 1e-4, samples=48, seed=4)
        f = by_name("neg-orthant")
        for _ in range(15):
            x = -np.abs(rng.normal(size=3))
            x[rng.integers(0, 3)] = 0.0
            w = rng.normal(size=3)
            closed = f.subderivative(x, w)
            est = numeric_subderivative(f.value, x, w, grid).value
            if np.isfinite(closed):
                assert abs(closed - est) <= 1e-3
            else:
                assert not np.isfinite(est)

    def test_parabolic_max(self, rng):
        f = by_name("max")
        grid = QuotientGrid.geometric(1e-1, 1e-4, samples=48, seed=5)
        for _ in range(10):
            x = np.array([0.0, 0.0, -1.0])
            w = np.array([1.0, 1.0, 0.0]) + np.concatenate([np.zeros(2), rng.normal(size=1)])
            z = rng.normal(size=3)
            closed = f.parabolic_subderivative(x, w, z)
            est = numeric_parabolic_subderivative(f.value, x, w, z, grid).value
            assert abs(closed - est) <= max(1e-3, 0.02 * abs(closed))

    def test_second_subderivative_neg_orthant(self, rng):
        f = by_name("neg-orthant")
        grid = QuotientGrid.geometric(1e-2, 1e-4, samples=64, seed=6)
        x = np.array([0.0, -1.0])
        v = np.array([2.0, 0.0])
        w = np.array([0.0, 4.0])  # critical direction
        closed = f.second_subderivative(x, v, w)
        # tilted quotients need the membership tolerance below t_min^2
        est = numeric_second_subderivative(lambda p: f.value(p, 1e-12), x, v, w, grid).value
        assert abs(closed - est) <= 1e-3
