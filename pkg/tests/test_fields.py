import numpy as np
import pytest

from charcurv.catalog import ellipsoid, make_surface, sphere
from charcurv.errors import DimensionError
from charcurv.fields import HamiltonianSpec, ScalarField, quadratic


def cubic():
    return ScalarField(
        3,
        lambda z: z[0] ** 3 + z[0] * z[1] * z[2],
        lambda z: np.array([3 * z[0] ** 2 + z[1] * z[2], z[0] * z[2], z[0] * z[1]]),
        lambda z: np.array([[6 * z[0], z[2], z[1]], [z[2], 0, z[0]], [z[1], z[0], 0]]),
    )


def test_fd_fallback_matches_analytic(rng):
    f = cubic()
    assert f.analytic
    pts = rng.standard_normal((10, 3))
    assert f.check_consistency(pts) <= 1e-5
    fd = f.values_only()
    assert not fd.analytic
    z = pts[0]
    np.testing.assert_allclose(fd.grad(z), f.grad(z), atol=1e-8)
    np.testing.assert_allclose(fd.hess(z), f.hess(z), atol=1e-4)


def test_inconsistent_evaluators_detected(rng):
    bad = ScalarField(2, lambda z: z @ z, lambda z: z, lambda z: np.eye(2))
    with pytest.raises(ValueError):
        bad.check_consistency(rng.standard_normal((3, 2)))


def test_shape_checks():
    f = cubic()
    with pytest.raises(DimensionError):
        f.value(np.zeros(4))
    with pytest.raises(DimensionError):
        HamiltonianSpec(3, lambda z: 0.0)
    with pytest.raises(ValueError):
        ScalarField(2, lambda z: 0.0, fd_step=0.0)


def test_quadratic_jet():
    Q = np.array([[2.0, 1.0], [1.0, 4.0]])
    f = quadratic(Q, b=[1.0, -1.0], c=3.0)
    jet = f.jet(np.array([1.0, 2.0]))
    assert jet.value == pytest.approx(0.5 * (2 + 4 + 16) + 1 - 2 + 3)
    np.testing.assert_allclose(jet.grad, Q @ [1, 2] + [1, -1])
    np.testing.assert_allclose(jet.hess, Q)


def test_catalog_samples_lie_on_surface(rng):
    for surf in (sphere(2.0, 2), ellipsoid([1, 2, 0.5, 1.5]), make_surface("cylinder2", 0.7, 1)):
        for z in surf.sample(rng, 5):
            assert abs(surf.H.value(z) - surf.level) <= 1e-12
            assert abs(surf.defining_function().value(z)) <= 1e-12


def test_catalog_errors():
    with pytest.raises(ValueError):
        make_surface("torus")
    with pytest.raises(ValueError):
        make_surface("ellipsoid")
    with pytest.raises(ValueError):
        ellipsoid([1, 2, 3])
