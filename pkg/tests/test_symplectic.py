import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from charcurv.catalog import cylinder1, cylinder2, sphere
from charcurv.errors import CriticalPointError, DimensionError, EnergyDriftError
from charcurv.fields import HamiltonianSpec, quadratic
from charcurv.symplectic import (J_matrix, PhasePoint, Trajectory, apply_J, characteristic_curvature_levelset,
                                 curvature_along_curve, hamiltonian_vector_field,
                                 integrate_characteristic_curve, liouville_form, random_symplectic_rotation,
                                 symplectic_form, tangent_basis)

finite = st.floats(-10, 10, allow_nan=False)


def even_vectors(min_n=1, max_n=3):
    return st.integers(min_n, max_n).flatmap(lambda n: arrays(float, 2 * n + 2, elements=finite))


class TestJ:
    def test_block_action(self):
        np.testing.assert_array_equal(apply_J([1, 0, 0, 0]), [0, 0, -1, 0])
        np.testing.assert_array_equal(apply_J([0, 0, 1, 0]), [1, 0, 0, 0])

    def test_square_is_minus_identity(self):
        np.testing.assert_array_equal(apply_J(apply_J([1, 2, 3, 4])), [-1, -2, -3, -4])

    @pytest.mark.parametrize("v", [[1, 2, 3], [1.0, 2.0]])
    def test_rejects_bad_length(self, v):
        with pytest.raises(DimensionError):
            apply_J(v)

    @given(even_vectors())
    def test_square_property(self, v):
        np.testing.assert_allclose(apply_J(apply_J(v)), -v, atol=0)

    def test_matrix_agrees_with_action(self, rng):
        for n in (1, 2, 3):
            v = rng.standard_normal(2 * n + 2)
            np.testing.assert_array_equal(J_matrix(n) @ v, apply_J(v))
            M = J_matrix(n)
            np.testing.assert_array_equal(M.T @ M, np.eye(2 * n + 2))


class TestForms:
    def test_liouville_examples(self):
        assert liouville_form([1, 0, 0, 0], [0, 0, 1, 0]) == -0.5
        assert liouville_form([0, 0, 2, 0], [3, 0, 0, 0]) == 3.0

    @given(even_vectors())
    def test_liouville_vanishes_on_radial(self, z):
        assert abs(liouville_form(z, z)) <= 1e-12 * (1 + z @ z)

    def test_symplectic_examples(self):
        assert symplectic_form([1, 2, 3, 4], [1, 2, 3, 4]) == 0.0
        e1 = np.array([1.0, 0, 0, 0])
        assert symplectic_form(e1, apply_J(e1)) == 1.0
        assert symplectic_form([1, 0, 0, 0], [0, 0, 1, 0]) == -1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            symplectic_form([1, 0, 0, 0], [1, 0, 0, 0, 0, 0])

    @given(even_vectors(1, 1), even_vectors(1, 1))
    def test_antisymmetry_and_compatibility(self, v, u):
        scale = 1 + np.abs(v).max() * np.abs(u).max()
        assert abs(symplectic_form(v, u) + symplectic_form(u, v)) <= 1e-12 * scale
        assert abs(symplectic_form(v, apply_J(u)) - v @ u) <= 1e-12 * scale


class TestVectorField:
    def test_sphere(self):
        z = np.array([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(hamiltonian_vector_field(sphere().H, z), [3, 4, -1, -2])

    def test_cylinder1(self):
        z = np.array([1.0, 2.0, 3.0, 4.0])
        np.testing.assert_array_equal(hamiltonian_vector_field(cylinder1().H, z), [0, 0, -1, -2])

    def test_tangent_to_level_set(self, rng):
        for n in (1, 2):
            d = 2 * n + 2
            Q = rng.standard_normal((d, d))
            H = quadratic(Q + Q.T, cls=HamiltonianSpec)
            z = rng.standard_normal(d)
            X = hamiltonian_vector_field(H, z)
            g = H.grad(z)
            assert abs(X @ g) <= 1e-12 * np.linalg.norm(g) ** 2
            # omega(v, X^H) = 0 for every tangent v
            for v in tangent_basis(g):
                assert abs(symplectic_form(v, X)) <= 1e-10 * np.linalg.norm(g)

    def test_parallel_fields_under_reparametrisation(self, rng):
        H = sphere(1.0, 2).H
        Ht = H.compose(np.exp, np.exp, np.exp)
        for z in rng.standard_normal((20, 6)):
            stack = np.vstack([hamiltonian_vector_field(H, z), hamiltonian_vector_field(Ht, z)])
            s = np.linalg.svd(stack, compute_uv=False)
            assert s[1] <= 1e-12 * s[0]


class TestCurvature:
    @pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_sphere(self, R, n, rng):
        surf = sphere(R, n)
        for z in surf.sample(rng, 10):
            assert abs(characteristic_curvature_levelset(surf.H, z) - 1 / R) <= 1e-10

    def test_cylinders(self, rng):
        R = 1.5
        c1, c2 = cylinder1(R), cylinder2(R)
        for z in c1.sample(rng, 20):
            assert abs(characteristic_curvature_levelset(c1.H, z)) <= 1e-10
        for z in c2.sample(rng, 20):
            assert abs(characteristic_curvature_levelset(c2.H, z) - 1 / R) <= 1e-10

    def test_critical_point(self):
        with pytest.raises(CriticalPointError):
            characteristic_curvature_levelset(sphere().H, np.zeros(4))

    def test_reparametrisation_invariance(self, rng):
        Q = np.diag([1.0, 2.0, 0.5, 3.0])
        H = quadratic(Q, cls=HamiltonianSpec)
        Ht = H.compose(lambda s: s + s**3, lambda s: 1 + 3 * s**2, lambda s: 6 * s)
        for z in rng.standard_normal((20, 4)):
            a = characteristic_curvature_levelset(H, z)
            b = characteristic_curvature_levelset(Ht, z)
            assert abs(a - b) <= 1e-10 * max(1, abs(a))

    def test_rigid_symplectic_invariance(self, rng):
        for n in (1, 2):
            d = 2 * n + 2
            Q = np.diag(rng.uniform(0.5, 2.0, d))
            H = quadratic(Q, cls=HamiltonianSpec)
            M = random_symplectic_rotation(n, rng)
            np.testing.assert_allclose(M @ J_matrix(n), J_matrix(n) @ M, atol=1e-12)
            b = rng.standard_normal(d)
            Hm = H.transformed(M, b)
            for z in rng.standard_normal((10, d)):
                a = characteristic_curvature_levelset(H, z)
                c = characteristic_curvature_levelset(Hm, M @ z + b)
                assert abs(a - c) <= 1e-10 * max(1, abs(a))

    def test_non_symplectic_isometry_changes_curvature(self, rng):
        # the two cylinders differ by swapping x2 and y1, an isometry that does not commute with J
        R = 1.0
        z = cylinder1(R).sample(rng, 1)[0]
        P = np.eye(4)[[0, 2, 1, 3]]
        assert abs(characteristic_curvature_levelset(cylinder1(R).H, z)) <= 1e-12
        H2 = cylinder1(R).H.transformed(P, np.zeros(4))
        assert abs(characteristic_curvature_levelset(H2, P @ z) - 1 / R) <= 1e-10


class TestTrajectory:
    def test_sphere_orbit_matches_closed_form(self):
        R = 1.3
        H = sphere(R).H
        traj = integrate_characteristic_curve(H, [R, 0, 0, 0], 2 * np.pi, 1e-3)
        t = traj.times
        exact = np.column_stack([R * np.cos(t), np.zeros_like(t), -R * np.sin(t), np.zeros_like(t)])
        assert np.max(np.abs(traj.states - exact)) <= 1e-6
        assert abs(t[-1] - 2 * np.pi) <= 1e-15
        energies = np.array([H.value(z) for z in traj.states])
        assert np.max(np.abs(energies - traj.energy)) <= 1e-8

    def test_curvature_along_orbits(self):
        H = sphere(2.0).H
        traj = integrate_characteristic_curve(H, [2.0, 0, 0, 0], 1.0, 1e-2)
        np.testing.assert_allclose(curvature_along_curve(H, traj), 0.5, atol=1e-12)
        c1 = cylinder1(1.0)
        traj = integrate_characteristic_curve(c1.H, [0.6, 0.8, 0.3, -0.2], 1.0, 1e-2)
        np.testing.assert_allclose(curvature_along_curve(c1.H, traj), 0.0, atol=1e-12)

    def test_agrees_with_levelset_formula(self, rng):
        Q = np.diag(rng.uniform(0.5, 2.0, 6))
        H = quadratic(Q, cls=HamiltonianSpec)
        traj = integrate_characteristic_curve(H, rng.standard_normal(6), 0.5, 1e-2)
        direct = [characteristic_curvature_levelset(H, z) for z in traj.states]
        np.testing.assert_allclose(curvature_along_curve(H, traj), direct, atol=1e-12)

    def test_time_rescaling(self):
        # c H has the same orbits traversed c times faster
        H = sphere(1.0).H
        H3 = H.compose(lambda s: 3 * s, lambda s: 3.0, lambda s: 0.0)
        a = curvature_along_curve(H, integrate_characteristic_curve(H, [1, 0, 0, 0], 0.3, 1e-2))
        b = curvature_along_curve(H3, integrate_characteristic_curve(H3, [1, 0, 0, 0], 0.1, 1e-2 / 3))
        np.testing.assert_allclose(a[::3][: len(b)], b[: len(a[::3])], atol=1e-12)

    def test_constant_hamiltonian_rejected(self):
        H = HamiltonianSpec(4, lambda z: 1.0, lambda z: np.zeros(4), lambda z: np.zeros((4, 4)))
        with pytest.raises(CriticalPointError):
            integrate_characteristic_curve(H, [1, 0, 0, 0], 1.0, 0.1)

    def test_energy_drift_reported(self):
        with pytest.raises(EnergyDriftError) as info:
            integrate_characteristic_curve(sphere().H, [1, 0, 0, 0], 10.0, 0.5, drift_tol=1e-9)
        assert info.value.step >= 1

    def test_bad_steps(self):
        with pytest.raises(ValueError):
            integrate_characteristic_curve(sphere().H, [1, 0, 0, 0], 1.0, 0.0)


class TestTypes:
    def test_phase_point(self):
        p = PhasePoint([1, 2, 3, 4])
        assert p.n == 1
        np.testing.assert_array_equal(p.x, [1, 2])
        np.testing.assert_array_equal(p.y, [3, 4])
        with pytest.raises(DimensionError):
            PhasePoint([1, 2, 3])

    def test_trajectory_times_increasing(self):
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), np.zeros((2, 4)), 0.0)
