"""Kepler propagation through the Delaunay flow on T*S^3.

On the sphere the Delaunay Hamiltonian -1/(2|eta|^2) generates a great-circle
rotation of (xi, eta/|eta|) at rate |eta|^-3, so

    propagate = inverse_LS . flow(t) . forward_LS

gives the exact Kepler motion, with Kepler's equation solved inside the
inverse map. Element extraction follows the usual flight-dynamics formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lsmap
from .errors import NonNegativeEnergy
from .phase import NEG, CartesianState, SphereState

TWO_PI = 2.0 * math.pi
DEGENERATE = 1e-12


def period(H: float) -> float:
    if not H < 0:
        raise NonNegativeEnergy(f"H = {H} has no period")
    return TWO_PI * (-2.0 * H) ** -1.5


def delaunay_flow(sp: SphereState, t: float) -> SphereState:
    if sp.sign != NEG:
        raise ValueError("the Delaunay flow is implemented for the elliptic branch only")
    rho = float(np.linalg.norm(sp.eta))
    angle = t / rho**3
    c, s = math.cos(angle), math.sin(angle)
    xi = c * sp.xi + s * sp.eta / rho
    eta = -rho * s * sp.xi + c * sp.eta
    return SphereState(xi, eta, NEG)


def propagate(state: CartesianState, t: float) -> CartesianState:
    if not state.energy < 0:
        raise NonNegativeEnergy("propagation needs a bound orbit")
    return lsmap.inverse(delaunay_flow(lsmap.forward(state), t))


@dataclass(frozen=True)
class OrbitalElements:
    a: float
    e: float
    i: float
    Omega: float
    omega: float
    tau: float


@dataclass(frozen=True)
class DelaunayElements:
    ell: float
    g: float
    h: float
    Lc: float
    Gc: float
    Hc: float


@dataclass(frozen=True)
class Anomalies:
    true: float
    eccentric: float
    mean: float


def _wrap(angle):
    return angle % TWO_PI


def elements(state: CartesianState, t: float = 0.0):
    """Kepler elements, Delaunay variables and anomalies of a bound state at time ``t``.

    Degenerate geometry: for i < 1e-12 the node is the x-axis and Omega = 0;
    for e < 1e-12, omega = 0 and anomalies are measured from the node.
    """
    q, p = state.q, state.p
    H = state.energy
    if not H < 0:
        raise NonNegativeEnergy("elements are defined for bound orbits only")
    r = state.radius
    Lvec = np.cross(q, p)
    G = float(np.linalg.norm(Lvec))
    Lhat = Lvec / G
    # classical eccentricity vector; equals -sqrt(-2H) times the rescaled Runge-Lenz vector
    evec = np.cross(p, Lvec) - q / r
    e = float(np.linalg.norm(evec))
    a = -0.5 / H

    inc = math.acos(max(-1.0, min(1.0, Lhat[2])))
    node = np.array([-Lvec[1], Lvec[0], 0.0])
    if np.linalg.norm(node) < DEGENERATE * G:
        node_hat = np.array([1.0, 0.0, 0.0])
        Omega = 0.0
    else:
        node_hat = node / np.linalg.norm(node)
        Omega = _wrap(math.atan2(node_hat[1], node_hat[0]))

    def angle_from(ref, v):
        return math.atan2(float(Lhat @ np.cross(ref, v)), float(ref @ v))

    if e < DEGENERATE:
        omega = 0.0
        peri_hat = node_hat
    else:
        peri_hat = evec / e
        omega = _wrap(angle_from(node_hat, peri_hat))

    nu = angle_from(peri_hat, q)
    E = 2.0 * math.atan2(math.sqrt(1.0 - e) * math.sin(nu / 2), math.sqrt(1.0 + e) * math.cos(nu / 2))
    M = E - e * math.sin(E)
    n = (-2.0 * H) ** 1.5
    tau = t - _wrap(M) / n

    orbital = OrbitalElements(a, e, inc, Omega, omega, tau)
    delaunay = DelaunayElements(_wrap(M), omega, Omega, 1.0 / math.sqrt(-2.0 * H), G, float(Lvec[2]))
    return orbital, delaunay, Anomalies(_wrap(nu), _wrap(E), _wrap(M))


def orbit_table(state: CartesianState, t_end: float, samples: int):
    """Rows (t, q1, q2, q3, p1, p2, p3, ell, g, h, Lc, Gc, Hc) along the orbit."""
    sp = lsmap.forward(state)
    rows = []
    for t in np.linspace(0.0, t_end, samples):
        s = lsmap.inverse(delaunay_flow(sp, float(t)))
        _, d, _ = elements(s, float(t))
        rows.append([float(t), *s.q, *s.p, d.ell, d.g, d.h, d.Lc, d.Gc, d.Hc])
    return rows
