import numpy as np
import pytest
from hypothesis import given, strategies as st

from keplerreg.curvature import (
    closed_form_CK,
    closed_form_CRt,
    closed_form_factors,
    curvature_batch,
    hk_derivatives,
    hr_derivatives,
    numeric_gradient,
    numeric_hessian,
    tangential_basis,
    tangential_curvature,
)
from keplerreg.errors import EvaluationFailed, ZeroGradient, ZeroPoint
from keplerreg.hamiltonians import eval_HK, hk_arrays, hr_arrays, hx_arrays
from keplerreg.projections import ComplexPair

vec4 = st.lists(st.floats(-2, 2, allow_nan=False), min_size=4, max_size=4).map(np.array)


def HK(x):
    return float(hk_arrays(x))


def HR(x):
    return float(hr_arrays(x))


def projected_curvature(grad, hess):
    """Basis-free oracle: |G|^6 det(U^T H U) for an orthonormal basis U of G-perp."""
    g = grad / np.linalg.norm(grad)
    u = np.linalg.svd(np.eye(4) - np.outer(g, g))[0][:, :3]
    return np.linalg.norm(grad) ** 6 * np.linalg.det(u.T @ hess @ u)


def point_with_X(rng, X):
    d = rng.normal(size=4)
    return d / np.linalg.norm(d) * np.sqrt(X)


def test_gradient_of_HK():
    np.testing.assert_allclose(numeric_gradient(HK, [1, 0, 0, 0]), [2, 0, 0, 0], atol=1e-8)
    np.testing.assert_allclose(numeric_gradient(lambda x: 3.0, [1, 2, 3, 4]), 0.0, atol=0)


def test_gradient_matches_closed_form(rng):
    for _ in range(20):
        v = point_with_X(rng, rng.uniform(0.5, 3))
        np.testing.assert_allclose(numeric_gradient(HK, v), hk_derivatives(v)[0], rtol=1e-7, atol=1e-9)


def test_hessian_of_HK():
    v = np.array([1.0, 0, 0, 0])
    np.testing.assert_allclose(numeric_hessian(HK, v), hk_derivatives(v)[1], rtol=1e-5, atol=1e-6)


def test_hessian_of_quadratic(rng):
    A = rng.normal(size=(4, 4))
    A = A + A.T
    H = numeric_hessian(lambda x: x @ A @ x, rng.normal(size=4))
    np.testing.assert_allclose(H, 2 * A, atol=1e-7)


def test_hessian_symmetric():
    H = numeric_hessian(HR, [1, 0, 0, 1])
    np.testing.assert_array_equal(H, H.T)


def test_basis_identity_quaternion():
    np.testing.assert_array_equal(tangential_basis([1, 0, 0, 0]), np.eye(4)[:, 1:])
    np.testing.assert_array_equal(tangential_basis([0, 1, 0, 0])[:, 0], [-1, 0, 0, 0])


@given(vec4)
def test_basis_orthogonality(G):
    if np.linalg.norm(G) < 1e-3:
        return
    B = tangential_basis(G)
    np.testing.assert_allclose(G @ B, 0.0, atol=1e-12)
    np.testing.assert_allclose(B.T @ B, (G @ G) * np.eye(3), atol=1e-12)


def test_zero_gradient():
    with pytest.raises(ZeroGradient):
        tangential_basis([0, 0, 0, 0])
    with pytest.raises(ZeroGradient):
        tangential_curvature(lambda x: 1.0, [0.1, 0.2, 0.3, 0.4])


def test_kepler_curvature_unit_sphere(rng):
    for _ in range(5):
        v = point_with_X(rng, 1.0)
        assert tangential_curvature(HK, v) == pytest.approx(512.0, rel=1e-5)
        assert tangential_curvature(None, v, hk_derivatives(v)) == pytest.approx(512.0, rel=1e-12)


def test_kepler_closed_form_values():
    assert closed_form_CK(ComplexPair([1, 0], [0, 1])) == pytest.approx(512 / 2**24)
    with pytest.raises(ZeroPoint):
        closed_form_CK(ComplexPair([0, 0], [0, 0]))


def test_rotating_closed_form_factors():
    cp = ComplexPair([1, 0], [0, 1])
    np.testing.assert_allclose(closed_form_factors(2.0, 2.0), [1, 3, 7, 3, 567, 6561])
    assert closed_form_CRt(cp) == pytest.approx(512 * 234365481 / 2**24)
    assert closed_form_CRt(cp) == pytest.approx(7152.27, abs=0.01)
    assert closed_form_CRt(ComplexPair([0.6, 0.0], [0.0, 0.8])) == 0.0


def test_rotating_reduces_when_L_vanishes():
    X = 1.7
    c = closed_form_factors(X, 0.0)
    assert c[4] == pytest.approx(7 * X**6 - 1)
    assert c[5] == pytest.approx((X**6 + 1) ** 2)


def test_rotating_curvature_matches_closed_form():
    v = np.array([1.0, 0, 0, 1])
    assert tangential_curvature(HR, v) == pytest.approx(closed_form_CRt(ComplexPair.from_point(v)), rel=1e-3)


def test_closed_form_derivatives_against_basis_free_oracle(rng):
    for _ in range(50):
        v = point_with_X(rng, rng.uniform(0.5, 3))
        for deriv, closed in ((hk_derivatives, closed_form_CK), (hr_derivatives, closed_form_CRt)):
            g, h = deriv(v)
            exact = closed(ComplexPair.from_point(v))
            assert projected_curvature(g, h) == pytest.approx(exact, rel=1e-9, abs=1e-12 * abs(exact) + 1e-300)
            assert tangential_curvature(None, v, (g, h)) == pytest.approx(exact, rel=1e-9)


def test_numeric_curvature_accuracy(rng):
    for _ in range(50):
        v = point_with_X(rng, rng.uniform(0.5, 3))
        cp = ComplexPair.from_point(v)
        assert tangential_curvature(HK, v) == pytest.approx(closed_form_CK(cp), rel=1e-4)
        assert tangential_curvature(HR, v) == pytest.approx(closed_form_CRt(cp), rel=1e-3)


def test_richardson_improves_estimate(rng):
    errs, errs_r = [], []
    for _ in range(20):
        v = point_with_X(rng, rng.uniform(0.5, 3))
        exact = closed_form_CRt(ComplexPair.from_point(v))
        errs.append(abs(tangential_curvature(HR, v) / exact - 1))
        errs_r.append(abs(tangential_curvature(HR, v, richardson=True) / exact - 1))
    assert max(errs_r) < 1e-3


def test_batch_matches_scalar(rng):
    pts = np.array([point_with_X(rng, rng.uniform(0.5, 3)) for _ in range(30)])
    batch = curvature_batch(hr_arrays, pts)
    single = [tangential_curvature(HR, v) for v in pts]
    np.testing.assert_allclose(batch, single, rtol=1e-12)


def test_pipeline_curvature_at_zero_mass(rng):
    pts = []
    while len(pts) < 40:
        v = rng.uniform(-0.8, 0.8, 4)
        if np.hypot(v[2], v[3]) > 0.05:
            pts.append(v)
    pts = np.array(pts)
    num = curvature_batch(lambda a: hx_arrays(a, 0.0).energy, pts)
    exact = np.array([closed_form_CRt(ComplexPair.from_point(v)) for v in pts])
    np.testing.assert_allclose(num, exact, rtol=1e-3)


def test_probe_outside_domain():
    with pytest.raises(EvaluationFailed):
        tangential_curvature(lambda x: eval_HK(ComplexPair.from_point(x)), [0, 0, 0, 0])
