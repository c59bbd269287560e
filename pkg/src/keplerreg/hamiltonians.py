"""Kepler, rotating Kepler and restricted three-body Hamiltonians.

``eval_HX`` pulls the restricted three-body Hamiltonian back to (w, z)
space through the Levi-Civita map, the stereographic projection, the inverse
LS map and the shift onto the heavy primary. ``hx_arrays`` is the same chain
vectorized over stacks of points; it is what the curvature scans call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import lsmap
from .errors import NorthPole, PrimaryCollision, ZeroPoint
from .phase import SphereState
from .projections import (
    ComplexPair,
    embed,
    embed_arrays,
    levi_civita_forward,
    levi_civita_forward_arrays,
    shift_T_mu,
    stereo_forward,
    stereo_forward_arrays,
)

COLLISION_RADIUS = 1e-14


def check_mu(mu: float) -> float:
    mu = float(mu)
    if not 0.0 <= mu <= 0.5:
        raise ValueError(f"mass ratio {mu} outside [0, 0.5]")
    return mu


def _X(points):
    points = np.asarray(points, dtype=float)
    return np.sum(points * points, axis=-1)


def _L(points):
    points = np.asarray(points, dtype=float)
    return 2.0 * (points[..., 0] * points[..., 3] - points[..., 1] * points[..., 2])


def hk_arrays(points):
    return -0.5 / _X(points) ** 2


def hr_arrays(points):
    return -0.5 / _X(points) ** 2 + _L(points)


def eval_HK(cp: ComplexPair) -> float:
    X = float(_X(cp.point))
    if X == 0.0:
        raise ZeroPoint("H_K is singular at w = z = 0")
    return -0.5 / X**2


def eval_HR(cp: ComplexPair) -> float:
    X = float(_X(cp.point))
    if X == 0.0:
        raise ZeroPoint("H_R is singular at w = z = 0")
    return -0.5 / X**2 + float(_L(cp.point))


def hc_arrays(q, p, mu):
    """Restricted three-body Hamiltonian in the rotating frame, vectorized."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    d_light = np.hypot(q[..., 0] + mu - 1.0, q[..., 1])
    d_heavy = np.hypot(q[..., 0] + mu, q[..., 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        light = mu / d_light if mu > 0 else 0.0
        heavy = (1.0 - mu) / d_heavy
    kinetic = 0.5 * np.sum(p * p, axis=-1)
    rotation = p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    return kinetic - light - heavy + rotation


def eval_HC(q, p, mu: float) -> float:
    mu = check_mu(mu)
    q = np.asarray(q, dtype=float)[:2]
    p = np.asarray(p, dtype=float)[:2]
    if math.hypot(q[0] + mu, q[1]) <= COLLISION_RADIUS:
        raise PrimaryCollision("q coincides with the heavy primary")
    if math.hypot(q[0] + mu - 1.0, q[1]) <= COLLISION_RADIUS:
        raise PrimaryCollision("q coincides with the light primary")
    return float(hc_arrays(q, p, mu))


def rest_energy(q, mu: float):
    """H_C at zero rotating-frame velocity, i.e. with p = (-q2, q1)."""
    q = np.asarray(q, dtype=float)
    d_light = np.hypot(q[..., 0] + mu - 1.0, q[..., 1])
    d_heavy = np.hypot(q[..., 0] + mu, q[..., 1])
    light = mu / d_light if mu > 0 else 0.0
    return -0.5 * np.sum(q * q, axis=-1) - light - (1.0 - mu) / d_heavy


@dataclass(frozen=True)
class LagrangePointL1:
    mu: float
    position: np.ndarray
    energy: float
    dist_heavy: float

    def to_json(self) -> dict:
        return {
            "mu": self.mu,
            "position": [float(v) for v in self.position],
            "energy": self.energy,
            "dist_heavy": self.dist_heavy,
        }


def _l1_slope(x, mu):
    return -x + (1.0 - mu) / (x + mu) ** 2 - mu / (1.0 - mu - x) ** 2


@lru_cache(maxsize=64)
def locate_L1(mu: float) -> LagrangePointL1:
    """Collinear point between the primaries where the rest energy is critical."""
    mu = check_mu(mu)
    if mu == 0.0:
        return LagrangePointL1(0.0, np.array([1.0, 0.0]), -1.5, 1.0)
    delta = 1e-6
    xs = np.linspace(-mu + delta, 1.0 - mu - delta, 10_000)
    slope = _l1_slope(xs, mu)
    change = np.flatnonzero(np.sign(slope[:-1]) * np.sign(slope[1:]) <= 0)
    k = change[-1]  # nearest the light primary
    x = brentq(_l1_slope, xs[k], xs[k + 1], args=(mu,), xtol=1e-14, rtol=4 * np.finfo(float).eps)
    position = np.array([x, 0.0])
    energy = float(rest_energy(position, mu))
    return LagrangePointL1(mu, position, energy, x + mu)


def delaunay_energy(sp: SphereState) -> float:
    eta2 = float(sp.eta @ sp.eta)
    return -0.5 / eta2


class HXValue(NamedTuple):
    energy: float
    q: np.ndarray
    p: np.ndarray
    rdhp: float


def eval_HX(cp: ComplexPair, mu: float) -> HXValue:
    """H_C composed with the shift, inverse LS map, stereographic projection and
    Levi-Civita map, evaluated one point at a time through the scalar maps."""
    mu = check_mu(mu)
    if math.hypot(*cp.z) <= 1e-14:
        raise NorthPole("z = 0 maps to the north pole")
    sp = embed(stereo_forward(levi_civita_forward(cp)))
    if sp.xi[0] >= 1.0 - 1e-14:
        raise NorthPole("chain reached the north pole")
    state = lsmap.inverse(sp)
    q_reg = state.q[:2]
    q = shift_T_mu(q_reg, mu)
    p = state.p[:2]
    energy = eval_HC(q, p, mu)
    rdhp = float(np.linalg.norm(q_reg)) / locate_L1(mu).dist_heavy
    return HXValue(energy, q, p, rdhp)


class HXArrays(NamedTuple):
    energy: np.ndarray
    q: np.ndarray
    p: np.ndarray
    rdhp: np.ndarray
    valid: np.ndarray


def hx_arrays(points, mu: float) -> HXArrays:
    """Vectorized :func:`eval_HX`. Invalid points get ``nan`` energy."""
    mu = check_mu(mu)
    points = np.asarray(points, dtype=float)
    x, y = levi_civita_forward_arrays(points)
    zn = np.hypot(points[..., 2], points[..., 3])
    ok = zn > 1e-14
    x = np.where(ok[..., None], x, 0.0)
    xi, eta = stereo_forward_arrays(x, y)
    xi4, eta4 = embed_arrays(xi, eta)
    q, p, den = lsmap.inverse_arrays(xi4, eta4)
    ok &= (xi[..., 0] < 1.0 - 1e-14) & (den > lsmap.DENOMINATOR_FLOOR)
    q_reg = q[..., :2]
    p = p[..., :2]
    q_frame = shift_T_mu(q_reg, mu)
    energy = hc_arrays(q_frame, p, mu)
    ok &= np.isfinite(energy)
    energy = np.where(ok, energy, np.nan)
    rdhp = np.linalg.norm(q_reg, axis=-1) / locate_L1(mu).dist_heavy
    return HXArrays(energy, q_frame, p, rdhp, ok)

