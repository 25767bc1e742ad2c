import numpy as np
import pytest

from charcurv.catalog import cylinder1, cylinder2, ellipsoid, random_ellipsoid, sphere
from charcurv.errors import CriticalPointError, OffSurfaceError, TangencyError
from charcurv.fields import HamiltonianSpec, quadratic
from charcurv.surfaces import (DefiningFunctionSurface, adapted_frame, characteristic_curvature,
                               characteristic_direction, curvature_relation_residual, levi_mean_curvature,
                               mean_curvature, principal_curvatures, second_fundamental_form, shape_matrix,
                               unit_normal)
from charcurv.symplectic import (J_matrix, apply_J, characteristic_curvature_levelset, hamiltonian_vector_field,
                                 random_symplectic_rotation)


def surface_of(cat, scale=1.0):
    f = cat.defining_function()
    if scale != 1.0:
        f = f.compose(lambda s: scale * s, lambda s: scale, lambda s: 0.0)
    return DefiningFunctionSurface(f)


def check_frame(S, z, frame, tol=1e-12):
    d = z.size
    n = d // 2 - 1
    M = frame.matrix()
    np.testing.assert_allclose(M @ M.T, np.eye(d), atol=tol)
    np.testing.assert_allclose(frame.Y, apply_J(frame.X), atol=tol)
    np.testing.assert_allclose(frame.T, -apply_J(frame.N), atol=tol)
    g = S.f.grad(z)
    assert np.max(np.abs(frame.tangent() @ g)) <= tol * np.linalg.norm(g)
    assert np.linalg.matrix_rank(M) == d
    assert frame.X.shape == (n, d)


class TestNormalAndDirection:
    def test_sphere_normal(self, rng):
        R = 2.0
        S = surface_of(sphere(R))
        z = sphere(R).sample(rng, 1)[0]
        np.testing.assert_allclose(unit_normal(S, z), -z / R, atol=1e-15)

    def test_scale_invariance(self, rng):
        e = ellipsoid([1, 2, 0.5, 1.5])
        z = e.sample(rng, 1)[0]
        np.testing.assert_allclose(unit_normal(surface_of(e), z), unit_normal(surface_of(e, 3.0), z), atol=1e-15)

    def test_characteristic_direction(self, rng):
        R = 1.5
        S = surface_of(sphere(R))
        np.testing.assert_allclose(characteristic_direction(S, [R, 0, 0, 0]), [0, 0, -1, 0], atol=1e-15)
        e = random_ellipsoid(2, rng)
        S = surface_of(e)
        for z in e.sample(rng, 5):
            T = characteristic_direction(S, z)
            X = hamiltonian_vector_field(S.f, z)
            np.testing.assert_allclose(T, X / np.linalg.norm(X), atol=1e-14)
            assert abs(T @ unit_normal(S, z)) <= 1e-15

    def test_off_surface_and_critical(self):
        S = surface_of(sphere(1.0))
        with pytest.raises(OffSurfaceError):
            unit_normal(S, [2.0, 0, 0, 0])
        f = quadratic(np.eye(4), cls=HamiltonianSpec)
        with pytest.raises(CriticalPointError):
            unit_normal(DefiningFunctionSurface(f), np.zeros(4))


class TestFrame:
    def test_invariants_on_random_quadrics(self, rng):
        for n in (1, 2, 3):
            for _ in range(30):
                e = random_ellipsoid(n, rng)
                S = surface_of(e)
                z = e.sample(rng, 1)[0]
                check_frame(S, z, adapted_frame(S, z))
                check_frame(S, z, adapted_frame(S, z, seed=7))

    def test_deterministic(self, rng):
        e = random_ellipsoid(2, rng)
        S = surface_of(e)
        z = e.sample(rng, 1)[0]
        a, b = adapted_frame(S, z), adapted_frame(S, z)
        np.testing.assert_array_equal(a.matrix(), b.matrix())

    def test_degenerate_seeds_skipped(self):
        # normal along e1: the first canonical seeds lie in span{N, T}
        S = surface_of(sphere(1.0, 2))
        z = np.array([1.0, 0, 0, 0, 0, 0])
        check_frame(S, z, adapted_frame(S, z))


class TestSecondFundamentalForm:
    def test_sphere_value(self, rng):
        R = 2.0
        S = surface_of(sphere(R))
        z = sphere(R).sample(rng, 1)[0]
        V = adapted_frame(S, z).X[0]
        assert second_fundamental_form(S, z, V, V) == pytest.approx(0.5, abs=1e-14)

    def test_symmetric(self, rng):
        e = random_ellipsoid(1, rng)
        S = surface_of(e)
        z = e.sample(rng, 1)[0]
        B = adapted_frame(S, z).tangent()
        for V in B:
            for W in B:
                a = second_fundamental_form(S, z, V, W)
                assert abs(a - second_fundamental_form(S, z, W, V)) <= 1e-12

    def test_rejects_normal_vector(self, rng):
        S = surface_of(sphere(1.0))
        z = sphere(1.0).sample(rng, 1)[0]
        with pytest.raises(TangencyError, match="not tangent"):
            second_fundamental_form(S, z, z, adapted_frame(S, z).T)

    def test_TT_equals_symplectic_formula(self, rng):
        for n in (1, 2):
            for _ in range(20):
                e = random_ellipsoid(n, rng)
                S = surface_of(e)
                z = e.sample(rng, 1)[0]
                a = characteristic_curvature(S, z)
                assert abs(a - characteristic_curvature_levelset(S.f, z)) <= 1e-10


class TestMeanCurvatures:
    @pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
    def test_sphere(self, R, rng):
        S = surface_of(sphere(R, 2))
        z = sphere(R, 2).sample(rng, 1)[0]
        assert mean_curvature(S, z) == pytest.approx(1 / R, abs=1e-12)
        assert levi_mean_curvature(S, z) == pytest.approx(1 / R, abs=1e-12)
        assert abs(curvature_relation_residual(S, z)) <= 1e-10

    def test_cylinder2(self, rng):
        R = 1.7
        c = cylinder2(R)
        S = surface_of(c)
        for z in c.sample(rng, 10):
            # independent oracle: eigenvalues of the shape operator on a QR tangent basis
            np.testing.assert_allclose(principal_curvatures(S, z), [0, 0, 1 / R], atol=1e-12)
            H = mean_curvature(S, z)
            assert H == pytest.approx(1 / (3 * R), abs=1e-12)
            C = characteristic_curvature_levelset(S.f, z)
            L = levi_mean_curvature(S, z)
            assert L == pytest.approx((3 * H - C) / 2, abs=1e-12)
            # direct: the Levi pair spans the flat directions
            assert L == pytest.approx(0.0, abs=1e-12)

    def test_cylinder1(self, rng):
        c = cylinder1(1.0)
        S = surface_of(c)
        for z in c.sample(rng, 10):
            assert abs(curvature_relation_residual(S, z)) <= 1e-10
            assert abs(characteristic_curvature_levelset(S.f, z)) <= 1e-12

    def test_trace_invariance(self, rng):
        e = random_ellipsoid(2, rng)
        S = surface_of(e)
        z = e.sample(rng, 1)[0]
        tr = np.trace(shape_matrix(S, z))
        assert abs(tr - principal_curvatures(S, z).sum()) <= 1e-12
        for seed in range(5):
            assert abs(mean_curvature(S, z, seed) - mean_curvature(S, z)) <= 1e-12
            assert abs(levi_mean_curvature(S, z, seed) - levi_mean_curvature(S, z)) <= 1e-10

    def test_relation_random_ellipsoids(self, rng):
        for n in (1, 2):
            for _ in range(100):
                e = random_ellipsoid(n, rng)
                z = e.sample(rng, 1)[0]
                assert abs(curvature_relation_residual(surface_of(e), z)) <= 1e-10
                fd = DefiningFunctionSurface(e.defining_function().values_only(1e-5))
                assert abs(curvature_relation_residual(fd, z)) <= 1e-6

    def test_holomorphic_invariance(self, rng):
        n = 2
        e = random_ellipsoid(n, rng)
        f = e.defining_function()
        M = random_symplectic_rotation(n, rng)
        assert np.allclose(M @ J_matrix(n), J_matrix(n) @ M)
        b = rng.standard_normal(2 * n + 2)
        S0 = DefiningFunctionSurface(f)
        S1 = DefiningFunctionSurface(f.transformed(M, b))
        for z in e.sample(rng, 10):
            w = M @ z + b
            assert abs(characteristic_curvature(S0, z) - characteristic_curvature(S1, w)) <= 1e-10
            assert abs(levi_mean_curvature(S0, z) - levi_mean_curvature(S1, w)) <= 1e-10
