"""Algebraic identities of the LS map and of the (w, z) chain, as residuals.

Each check evaluates both sides of an identity on a concrete state and
records the largest absolute difference. Checks are scaled by
max(1, |eta|^2) (Euclidean norm): eta^2 = -1/(2H) blows up near H = 0,
and on the hyperbolic branch the components grow like cosh(phi) while the
Lorentzian square stays fixed, so cancellation error scales with |eta|^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lsmap
from .errors import CollisionState, ZeroEnergy
from .hamiltonians import eval_HK, eval_HR
from .phase import ENERGY_DEAD_ZONE, CartesianState, conserved, minkowski
from .projections import ComplexPair, embed, levi_civita_forward, stereo_forward

DEFAULT_TOLERANCE = 1e-10
_CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass(frozen=True)
class IdentityReport:
    residuals: dict
    tolerance: float
    scale: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def failures(self) -> list:
        limit = self.tolerance * self.scale
        return [name for name, r in self.residuals.items() if not r <= limit]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"residuals": self.residuals, "tolerance": self.tolerance,
                "scale": self.scale, "ok": self.ok}


def _diff(*sides):
    """Largest pairwise deviation from the first side."""
    first = np.asarray(sides[0], dtype=float)
    return max(float(np.max(np.abs(np.asarray(s, dtype=float) - first))) for s in sides[1:])


def _cross_rs(r, s):
    # (r_j s_k - r_k s_j) over the spatial indices 1..3
    rv, sv = r[1:], s[1:]
    return np.array([rv[j] * sv[k] - rv[k] * sv[j] for _, j, k in _CYCLIC])


def verify_identities(state: CartesianState, tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """Residuals of the LS identities for either energy sign."""
    q, p = state.q, state.p
    qn = float(np.linalg.norm(q))
    if qn == 0.0:
        raise CollisionState("q = 0 is a collision state")
    H = state.energy
    if abs(H) < ENERGY_DEAD_ZONE:
        raise ZeroEnergy("parabolic state has no LS image")

    rs = lsmap.forward_F1(state)
    sp = lsmap.forward_F2(rs, H)
    r, s, xi, eta = rs.r, rs.s, sp.xi, sp.eta
    sign = sp.sign
    k = math.sqrt(abs(2.0 * H))
    eta2 = float(minkowski(eta, eta, sign))
    rho = math.sqrt(abs(eta2))
    phi = sp.phi
    cons = conserved(state)
    L_xi = np.array([xi[1 + j] * eta[1 + kk] - xi[1 + kk] * eta[1 + j] for _, j, kk in _CYCLIC])
    M_xi = xi[0] * eta[1:] - xi[1:] * eta[0]
    M_q = (q / qn + p * float(q @ p) - q * float(p @ p)) / k
    HR = H + q[1] * p[0] - q[0] * p[1]
    xi_rot = xi[2] * eta[1] - xi[1] * eta[2]
    rs_rot = r[2] * s[1] - r[1] * s[2]

    res = {}
    if H < 0:
        res["|r|^2 = 1"] = _diff(r @ r, 1.0)
        res["r.s = 0"] = _diff(r @ s, 0.0)
        res["|s|^2 = 1"] = _diff(s @ s, 1.0)
        res["|xi|^2 = 1"] = _diff(xi @ xi, 1.0)
        res["xi.eta = 0"] = _diff(xi @ eta, 0.0)
        res["|eta|^2 = -1/2H"] = _diff(eta2, -0.5 / H)
        res["Kepler angle"] = _diff(k * float(q @ p), -s[0], phi,
                                       xi[0] * math.sin(phi) - eta[0] / rho * math.cos(phi))
        res["1 - r0"] = _diff(-2.0 * H * qn, 2.0 - float(p @ p) * qn, 1.0 - r[0],
                                 1.0 - xi[0] * math.cos(phi) - eta[0] / rho * math.sin(phi))
        res["angular momentum"] = _diff(cons.L, _cross_rs(r, s) / k, L_xi)
        res["Runge-Lenz"] = _diff(M_q, (r[0] * s[1:] - r[1:] * s[0]) / k, M_xi)
        res["Delaunay energy"] = _diff(H, -0.5 / eta2)
        res["rotating energy"] = _diff(HR, H + rs_rot / k, -0.5 / eta2 + xi_rot)
    else:
        res["|r|^2 = 1"] = _diff(minkowski(r, r, sign), 1.0)
        res["r.s = 0"] = _diff(minkowski(r, s, sign), 0.0)
        res["|s|^2 = -1"] = _diff(minkowski(s, s, sign), -1.0)
        res["|xi|^2 = 1"] = _diff(minkowski(xi, xi, sign), 1.0)
        res["xi.eta = 0"] = _diff(minkowski(xi, eta, sign), 0.0)
        res["|eta|^2 = -1/2H"] = _diff(eta2, -0.5 / H)
        res["Kepler angle"] = _diff(k * float(q @ p), -s[0], phi,
                                       xi[0] * math.sinh(phi) + eta[0] / rho * math.cosh(phi))
        res["1 - r0"] = _diff(-2.0 * H * qn, 2.0 - float(p @ p) * qn, 1.0 - r[0],
                                 1.0 - xi[0] * math.cosh(phi) - eta[0] / rho * math.sinh(phi))
        res["angular momentum"] = _diff(cons.L, -_cross_rs(r, s) / k, L_xi)
        res["Runge-Lenz"] = _diff(M_q, -(r[0] * s[1:] - r[1:] * s[0]) / k, M_xi)
        res["Delaunay energy"] = _diff(H, -0.5 / eta2)
        res["rotating energy"] = _diff(HR, H - rs_rot / k, -0.5 / eta2 + xi_rot)
    return IdentityReport(res, tolerance, max(1.0, float(eta @ eta)))


def verify_chain_identities(cp: ComplexPair, tolerance: float = DEFAULT_TOLERANCE) -> IdentityReport:
    """Residuals of the stereographic / Levi-Civita identities at one (w, z)."""
    w, z = cp.w, cp.z
    pc = levi_civita_forward(cp)
    x, y = pc.x, pc.y
    sp = stereo_forward(pc)
    xi, eta = sp.xi[:3], sp.eta[:3]
    X = float(w @ w + z @ z)
    x2 = float(x @ x)
    eta2 = float(eta @ eta)
    planar_L = xi[1] * eta[2] - xi[2] * eta[1]
    wz_L = 2.0 * (w[0] * z[1] - w[1] * z[0])
    state = lsmap.inverse(embed(sp))
    qs, ps = state.q, state.p
    HR_qp = 0.5 * float(ps @ ps) - 1.0 / state.radius + ps[0] * qs[1] - ps[1] * qs[0]

    res = {
        "|xi|^2 = 1": _diff(xi @ xi, 1.0),
        "xi.eta = 0": _diff(xi @ eta, 0.0),
        "|eta|^2": _diff(eta2, ((x2 + 1.0) / 2.0) ** 2 * float(y @ y), X * X),
        "angular momentum": _diff(planar_L, x[0] * y[1] - x[1] * y[0], wz_L),
        "Kepler energy": _diff(-0.5 / eta2, -2.0 / ((x2 + 1.0) ** 2 * float(y @ y)), eval_HK(cp)),
        "rotating energy": _diff(HR_qp, -0.5 / eta2 + planar_L,
                                     -2.0 / ((x2 + 1.0) ** 2 * float(y @ y)) + x[0] * y[1] - x[1] * y[0],
                                     eval_HR(cp)),
    }
    return IdentityReport(res, tolerance, max(1.0, eta2))


def eccentricity_consistency(state: CartesianState) -> float:
    """|sqrt(-2H) |M| - sqrt(1 + 2H |L|^2)| for a bound state."""
    c = conserved(state)
    e1 = math.sqrt(-2.0 * c.H) * float(np.linalg.norm(c.M))
    e2 = math.sqrt(max(0.0, 1.0 + 2.0 * c.H * float(c.L @ c.L)))
    return abs(e1 - e2)

