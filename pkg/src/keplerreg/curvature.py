"""Tangential Gauss-Kronecker curvature of a Hamiltonian on R^4.

The gradient G is read as a quaternion; G*i, G*j, G*k span its orthogonal
complement, and the curvature is det(B^T Hess B) for that 4x3 basis B.

Derivatives come either from central differences (any scalar field,
including the three-body pipeline, which passes through a root solve) or
from closed forms for the Kepler and rotating Kepler Hamiltonians.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError, EvaluationFailed, ZeroGradient, ZeroPoint
from .projections import ComplexPair

GRAD_STEP = 1e-6
HESS_STEP = 1e-4


def _steps(point, rel):
    return rel * np.maximum(1.0, np.abs(point))


def _probe_offsets(hg, hh):
    """Offsets for one point: center, gradient pairs, Hessian diagonal pairs,
    and the four corners for each of the 6 off-diagonal pairs (41 rows)."""
    rows = [np.zeros(4)]
    for i in range(4):
        e = np.zeros(4)
        e[i] = hg[i]
        rows += [e, -e]
    for i in range(4):
        e = np.zeros(4)
        e[i] = hh[i]
        rows += [e, -e]
    for i in range(4):
        for j in range(i + 1, 4):
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                e = np.zeros(4)
                e[i] = si * hh[i]
                e[j] = sj * hh[j]
                rows.append(e)
    return np.array(rows)


def _assemble(vals, hg, hh):
    """Gradient and Hessian from probe values with trailing axis of length 41."""
    f0 = vals[..., 0]
    grad = np.stack([(vals[..., 1 + 2 * i] - vals[..., 2 + 2 * i]) / (2 * hg[..., i]) for i in range(4)], axis=-1)
    hess = np.empty(vals.shape[:-1] + (4, 4))
    for i in range(4):
        plus, minus = vals[..., 9 + 2 * i], vals[..., 10 + 2 * i]
        hess[..., i, i] = (plus - 2 * f0 + minus) / hh[..., i] ** 2
    k = 17
    for i in range(4):
        for j in range(i + 1, 4):
            pp, pm, mp, mm = (vals[..., k + n] for n in range(4))
            hess[..., i, j] = hess[..., j, i] = (pp - pm - mp + mm) / (4 * hh[..., i] * hh[..., j])
            k += 4
    return grad, hess


def derivatives_batch(F, points, richardson=False):
    """Central-difference gradient and Hessian of a vectorized field.

    ``F`` maps an array of shape (..., 4) to values of shape (...). Returns
    ``(grad, hess)`` of shapes (N, 4) and (N, 4, 4). With ``richardson`` the
    estimates at steps h and h/2 are combined to cancel the O(h^2) term.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))

    def once(scale):
        hg = _steps(points, GRAD_STEP * scale)
        hh = _steps(points, HESS_STEP * scale)
        offsets = np.stack([_probe_offsets(a, b) for a, b in zip(hg, hh)])
        vals = F(points[:, None, :] + offsets)
        return _assemble(vals, hg, hh)

    grad, hess = once(1.0)
    if richardson:
        g2, h2 = once(0.5)
        grad = g2 + (g2 - grad) / 3.0
        hess = h2 + (h2 - hess) / 3.0
    return grad, 0.5 * (hess + np.swapaxes(hess, -1, -2))


def _scalar_field(f):
    def F(arr):
        out = np.empty(arr.shape[:-1])
        for idx in np.ndindex(out.shape):
            try:
                out[idx] = f(arr[idx])
            except DomainError as exc:
                raise EvaluationFailed(f"probe point {arr[idx]} left the domain: {exc}") from exc
        if not np.all(np.isfinite(out)):
            raise EvaluationFailed("non-finite value at a probe point")
        return out
    return F


def numeric_gradient(f, point) -> np.ndarray:
    """Central-difference gradient with step 1e-6 * max(1, |x_i|)."""
    point = np.asarray(point, dtype=float)
    h = _steps(point, GRAD_STEP)
    F = _scalar_field(f)
    grad = np.empty(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h[i]
        plus, minus = F(np.stack([point + e, point - e]))
        grad[i] = (plus - minus) / (2 * h[i])
    return grad


def numeric_hessian(f, point, richardson=False) -> np.ndarray:
    """Symmetrized central second differences with step 1e-4 * max(1, |x_i|)."""
    return derivatives_batch(_scalar_field(f), point, richardson)[1][0]


def tangential_basis(G) -> np.ndarray:
    """The 4x3 matrix (G*i, G*j, G*k) of quaternion products."""
    G = np.asarray(G, dtype=float)
    if np.linalg.norm(G) <= 1e-14:
        raise ZeroGradient("gradient vanishes; no tangent basis")
    return tangential_basis_arrays(G)


def tangential_basis_arrays(G):
    G1, G2, G3, G4 = (G[..., k] for k in range(4))
    rows = [
        [-G2, -G3, -G4],
        [G1, -G4, G3],
        [G4, G1, -G2],
        [-G3, G2, G1],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def det3(A):
    """Cofactor expansion along the first row, vectorized over leading axes."""
    return (
        A[..., 0, 0] * (A[..., 1, 1] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 1])
        - A[..., 0, 1] * (A[..., 1, 0] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 0])
        + A[..., 0, 2] * (A[..., 1, 0] * A[..., 2, 1] - A[..., 1, 1] * A[..., 2, 0])
    )


def curvature_from_derivatives(grad, hess):
    B = tangential_basis_arrays(grad)
    return det3(np.swapaxes(B, -1, -2) @ hess @ B)


def tangential_curvature(f, point, derivatives=None, richardson=False) -> float:
    """det(B^T Hess(f) B) at ``point``.

    ``derivatives`` may supply ``(grad, hess)`` directly (e.g. from the
    closed forms below); otherwise they are taken numerically.
    """
    point = np.asarray(point, dtype=float)
    if derivatives is None:
        grad, hess = derivatives_batch(_scalar_field(f), point, richardson)
        grad, hess = grad[0], hess[0]
    else:
        grad, hess = derivatives
    if np.linalg.norm(grad) <= 1e-12:
        raise ZeroGradient("gradient vanishes at the point")
    return float(curvature_from_derivatives(np.asarray(grad), np.asarray(hess)))


def curvature_batch(F, points, richardson=False):
    """Curvature of a vectorized field at many points (nan where undefined)."""
    grad, hess = derivatives_batch(F, points, richardson)
    with np.errstate(invalid="ignore"):
        return curvature_from_derivatives(grad, hess)


def _XL(point):
    w1, w2, z1, z2 = point
    return w1 * w1 + w2 * w2 + z1 * z1 + z2 * z2, 2.0 * (w1 * z2 - w2 * z1)


_L_GRAD = np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float) * 2.0


def hk_derivatives(point):
    point = np.asarray(point, dtype=float)
    X = float(point @ point)
    grad = 2.0 * point / X**3
    hess = 2.0 / X**3 * np.eye(4) - 12.0 / X**4 * np.outer(point, point)
    return grad, hess


def hr_derivatives(point):
    """Closed-form derivatives of H_K + 2 (w1 z2 - w2 z1)."""
    point = np.asarray(point, dtype=float)
    grad, hess = hk_derivatives(point)
    return grad + _L_GRAD @ point, hess + _L_GRAD


def closed_form_CK(cp: ComplexPair) -> float:
    X, _ = _XL(cp.point)
    if X <= 0:
        raise ZeroPoint("curvature undefined at the origin")
    return 512.0 / X**24


def closed_form_factors(X, L):
    return (
        X - 1.0,
        X + 1.0,
        X * X + X + 1.0,
        X * X - X + 1.0,
        -6.0 * L * L * X**4 + L * X**8 - L * X * X + 7.0 * X**6 - 1.0,
        (X**6 + 2.0 * L * X * X + 1.0) ** 2,
    )


def closed_form_CRt_arrays(points):
    points = np.asarray(points, dtype=float)
    X = np.sum(points * points, axis=-1)
    L = 2.0 * (points[..., 0] * points[..., 3] - points[..., 1] * points[..., 2])
    out = 512.0 / X**24
    for c in closed_form_factors(X, L):
        out = out * c
    return out


def closed_form_CRt(cp: ComplexPair) -> float:
    X, _ = _XL(cp.point)
    if X <= 0:
        raise ZeroPoint("curvature undefined at the origin")
    return float(closed_form_CRt_arrays(cp.point))
