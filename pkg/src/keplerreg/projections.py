"""Stereographic projection, Levi-Civita map and the primary shift.

Complex numbers are carried as real 2-vectors (re, im). The chain

    (w, z) --LC--> (x, y) --stereo--> (xi, eta) on T*S^2 --embed--> T*S^3

feeds the negative-energy inverse LS map; the shift then moves the
regularized collision point onto the heavy primary at (-mu, 0).

Orientation conventions: the Levi-Civita quotient uses conj(z), so that
x1 y2 - x2 y1 = 2 (w1 z2 - w2 z1), and the embedding into T*S^3 negates the
xi2/eta2 components. Together they make the pulled-back rotating Kepler
Hamiltonian equal to H_K + 2 (w1 z2 - w2 z1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NorthPole, ZeroY, ZeroZ
from .phase import NEG, SphereState

REG_TO_FRAME = "reg->frame"
FRAME_TO_REG = "frame->reg"


def _vec2(v):
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size != 2:
        raise ValueError(f"expected a 2-vector, got {a.size} components")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PlanarCotangent:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _vec2(self.x))
        object.__setattr__(self, "y", _vec2(self.y))


@dataclass(frozen=True, eq=False)
class ComplexPair:
    w: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "w", _vec2(self.w))
        object.__setattr__(self, "z", _vec2(self.z))

    @classmethod
    def from_point(cls, point) -> "ComplexPair":
        point = np.asarray(point, dtype=float)
        return cls(point[:2], point[2:])

    @property
    def point(self) -> np.ndarray:
        return np.r_[self.w, self.z]


def stereo_forward_arrays(x, y):
    """(x, y) with shape (..., 2) to (xi, eta) with shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n2 = np.sum(x * x, axis=-1)
    half = 0.5 * (n2 + 1.0)
    xy = np.sum(x * y, axis=-1)
    xi = np.concatenate([((n2 - 1.0) / (n2 + 1.0))[..., None], x / half[..., None]], axis=-1)
    eta = np.concatenate([xy[..., None], half[..., None] * y - xy[..., None] * x], axis=-1)
    return xi, eta


def stereo_forward(pc: PlanarCotangent) -> SphereState:
    xi, eta = stereo_forward_arrays(pc.x, pc.y)
    return SphereState(np.r_[xi, 0.0], np.r_[eta, 0.0], NEG)


def stereo_inverse(sp: SphereState) -> PlanarCotangent:
    xi0 = float(sp.xi[0])
    if xi0 >= 1.0 - 1e-14:
        raise NorthPole(f"xi0 = {xi0!r} is the north pole")
    d = 1.0 - xi0
    x = sp.xi[1:3] / d
    y = sp.eta[0] * sp.xi[1:3] + d * sp.eta[1:3]
    return PlanarCotangent(x, y)


_FLIP = np.array([1.0, 1.0, -1.0])


def embed_arrays(xi, eta):
    """Place (..., 3) sphere coordinates into R^4 for the LS inverse."""
    pad = np.zeros(np.shape(xi)[:-1] + (1,))
    return (np.concatenate([np.asarray(xi) * _FLIP, pad], axis=-1),
            np.concatenate([np.asarray(eta) * _FLIP, pad], axis=-1))


def embed(sp: SphereState) -> SphereState:
    """T*S^2 (stereographic coordinates) into T*S^3 (LS coordinates)."""
    xi, eta = embed_arrays(sp.xi[:3], sp.eta[:3])
    return SphereState(xi, eta, NEG)


def unembed(sp: SphereState) -> SphereState:
    """Inverse of :func:`embed` (the reflection is an involution)."""
    xi, eta = embed_arrays(sp.xi[:3], sp.eta[:3])
    return SphereState(xi, eta, NEG)


def _c(v):
    return complex(v[0], v[1])


def _r(c):
    return np.array([c.real, c.imag])


def levi_civita_forward(cp: ComplexPair) -> PlanarCotangent:
    w, z = _c(cp.w), _c(cp.z)
    if abs(z) <= 1e-14:
        raise ZeroZ("Levi-Civita map divides by z")
    return PlanarCotangent(_r(w / z.conjugate()), _r(2.0 * z * z))


def levi_civita_forward_arrays(points):
    """Vectorized Levi-Civita map; ``points`` has shape (..., 4) = (w1, w2, z1, z2)."""
    points = np.asarray(points, dtype=float)
    w = points[..., 0] + 1j * points[..., 1]
    z = points[..., 2] + 1j * points[..., 3]
    with np.errstate(divide="ignore", invalid="ignore"):
        x = w / np.conj(z)
    y = 2.0 * z * z
    return np.stack([x.real, x.imag], axis=-1), np.stack([y.real, y.imag], axis=-1)


def levi_civita_inverse(pc: PlanarCotangent) -> ComplexPair:
    """Principal-branch inverse; the other preimage is the negated pair."""
    x, y = _c(pc.x), _c(pc.y)
    if abs(y) <= 1e-14:
        raise ZeroY("Levi-Civita inverse needs y != 0")
    z = np.sqrt(y) / math.sqrt(2.0)
    return ComplexPair(_r(x * z.conjugate()), _r(z))


def shift_T_mu(q, mu: float, direction: str = REG_TO_FRAME):
    """Move between regularized coordinates (heavy primary at the origin)
    and rotating-frame coordinates (heavy primary at (-mu, 0))."""
    if not 0.0 <= mu <= 0.5:
        raise ValueError("mass ratio must lie in [0, 0.5]")
    q = np.array(q, dtype=float)
    if direction == REG_TO_FRAME:
        q[..., 0] -= mu
    elif direction == FRAME_TO_REG:
        q[..., 0] += mu
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return q
