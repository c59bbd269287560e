"""Forward and inverse Ligon-Schaaf map for both energy signs.

The forward map factors into an algebraic part F1, (q, p) -> (r, s), and a
rescaled rotation F2, (r, s) -> (xi, eta), by the angle phi = -s0. The
inverse undoes the rotation by the same angle, which has to be recovered from
(xi, eta) by solving the generalized Kepler equation.

Both the factored and the fused (single formula) versions are provided; the
test suite checks that they agree.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import CollisionState, DegenerateDenominator, ZeroEnergy
from .kepler_equation import solve_elliptic, solve_elliptic_array, solve_hyperbolic
from .phase import ENERGY_DEAD_ZONE, NEG, POS, CartesianState, RSState, SphereState

DENOMINATOR_FLOOR = 1e-14


def _checked(state: CartesianState):
    q, p = state.q, state.p
    qn = float(np.linalg.norm(q))
    if qn == 0.0:
        raise CollisionState("q = 0 is a collision state")
    H = 0.5 * float(p @ p) - 1.0 / qn
    if abs(H) < ENERGY_DEAD_ZONE:
        raise ZeroEnergy(f"|H| = {abs(H):.3g} is inside the parabolic dead zone")
    return q, p, qn, H


def forward_F1(state: CartesianState) -> RSState:
    q, p, qn, H = _checked(state)
    k = math.sqrt(abs(2.0 * H))
    qp = float(q @ p)
    r0 = float(p @ p) * qn - 1.0
    rvec = k * qn * p
    s0 = -k * qp
    bracket = q / qn - qp * p
    if H < 0:
        svec = -bracket
        sign = NEG
    else:
        svec = bracket
        sign = POS
    return RSState(np.r_[r0, rvec], np.r_[s0, svec], sign)


def forward_F2(rs: RSState, H: float) -> SphereState:
    if (H < 0) != (rs.sign == NEG):
        raise ValueError("energy sign does not match the RS state branch")
    k = math.sqrt(abs(2.0 * H))
    r, s = rs.r, rs.s
    phi = -float(s[0])
    if rs.sign == NEG:
        c, sn = math.cos(phi), math.sin(phi)
        xi = r * c - s * sn
        eta = (s * c + r * sn) / k
    else:
        c, sn = math.cosh(phi), math.sinh(phi)
        xi = r * c + s * sn
        eta = -(s * c + r * sn) / k
    return SphereState(xi, eta, rs.sign, phi)


def forward(state: CartesianState) -> SphereState:
    """LS image of a Kepler state, computed as F2 after F1."""
    return forward_F2(forward_F1(state), state.energy)


def forward_fused(state: CartesianState) -> SphereState:
    """Same map as :func:`forward`, evaluated from the closed formulas."""
    q, p, qn, H = _checked(state)
    k = math.sqrt(abs(2.0 * H))
    qp = float(q @ p)
    a = float(p @ p) * qn - 1.0
    bracket = q / qn - qp * p
    phi = k * qp
    if H < 0:
        c, sn = math.cos(phi), math.sin(phi)
        xi0 = a * c + k * qp * sn
        xiv = k * qn * p * c + bracket * sn
        eta0 = -qp * c + a * sn / k
        etav = -bracket * c / k + qn * p * sn
        sign = NEG
    else:
        c, sn = math.cosh(phi), math.sinh(phi)
        xi0 = a * c - k * qp * sn
        xiv = k * qn * p * c + bracket * sn
        eta0 = qp * c - a * sn / k
        etav = -bracket * c / k - qn * p * sn
        sign = POS
    return SphereState(np.r_[xi0, xiv], np.r_[eta0, etav], sign, phi)


def _unit_eta(sp: SphereState):
    eta_sq = sp.eta_sq
    if sp.sign == NEG and not eta_sq > 0:
        raise DegenerateDenominator("eta = 0 has no Kepler preimage")
    if sp.sign == POS and not eta_sq < 0:
        raise DegenerateDenominator("hyperbolic branch needs -eta^2 > 0")
    rho = math.sqrt(abs(eta_sq))
    return rho, sp.eta / rho, -0.5 / eta_sq


def _check_denominator(den, sign):
    # 1 - r0 = -2 H |q|: positive on the elliptic branch, negative on the hyperbolic one
    if sign == NEG and den <= DENOMINATOR_FLOOR:
        raise DegenerateDenominator(f"1 - r0 = {den:.3g}: collision / north pole")
    if sign == POS and den >= -DENOMINATOR_FLOOR:
        raise DegenerateDenominator(f"1 - r0 = {den:.3g}: collision")


def recover_angle(sp: SphereState) -> float:
    """Rotation angle of the forward map, recovered from the Kepler equation."""
    rho, eta_hat, _ = _unit_eta(sp)
    if sp.sign == NEG:
        return solve_elliptic(sp.xi[0], eta_hat[0]).phi
    return solve_hyperbolic(sp.xi[0], eta_hat[0]).phi


def inverse_G2(sp: SphereState) -> RSState:
    rho, eta_hat, _ = _unit_eta(sp)
    phi = recover_angle(sp)
    xi = sp.xi
    if sp.sign == NEG:
        c, sn = math.cos(phi), math.sin(phi)
        r = xi * c + eta_hat * sn
        s = -xi * sn + eta_hat * c
    else:
        c, sn = math.cosh(phi), math.sinh(phi)
        r = xi * c + eta_hat * sn
        s = -xi * sn - eta_hat * c
    _check_denominator(1.0 - r[0], sp.sign)
    return RSState(r, s, sp.sign)


def inverse_G1(rs: RSState, H: float) -> CartesianState:
    r0, s0 = float(rs.r[0]), float(rs.s[0])
    rv, sv = rs.r[1:], rs.s[1:]
    den = 1.0 - r0
    _check_denominator(den, rs.sign)
    k = math.sqrt(abs(2.0 * H))
    if rs.sign == NEG:
        q = (sv * den + rv * s0) / (2.0 * H)
        p = k * rv / den
    else:
        q = -(sv * den + rv * s0) / (2.0 * H)
        p = -k * rv / den
    return CartesianState(q, p)


def inverse(sp: SphereState) -> CartesianState:
    """Kepler preimage of an LS state, computed as G1 after G2."""
    return inverse_G1(inverse_G2(sp), sp.energy)


def inverse_fused(sp: SphereState) -> CartesianState:
    """Same map as :func:`inverse`, evaluated from the closed formulas."""
    rho, eta_hat, _ = _unit_eta(sp)
    phi = recover_angle(sp)
    xi0, xiv = float(sp.xi[0]), sp.xi[1:]
    y, ehv = float(eta_hat[0]), eta_hat[1:]
    eta_sq = sp.eta_sq
    if sp.sign == NEG:
        c, sn = math.cos(phi), math.sin(phi)
        den = 1.0 - xi0 * c - y * sn
        _check_denominator(den, NEG)
        q = eta_sq * (-xiv * (y - sn) + ehv * (xi0 - c))
        p = (xiv * c + ehv * sn) / (rho * den)
    else:
        c, sn = math.cosh(phi), math.sinh(phi)
        den = 1.0 - xi0 * c - y * sn
        _check_denominator(den, POS)
        q = -eta_sq * (xiv * (y + sn) - ehv * (xi0 - c))
        p = -(xiv * c + ehv * sn) / (rho * den)
    return CartesianState(q, p)


def inverse_arrays(xi, eta):
    """Vectorized negative-energy inverse for stacks of states.

    ``xi`` and ``eta`` have shape (..., 4). Returns ``(q, p, den)`` with
    ``den = 1 - r0``; entries with ``den <= 1e-14`` are not valid preimages
    and are left to the caller to mask.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    rho = np.sqrt(np.sum(eta * eta, axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        eta_hat = eta / rho[..., None]
    y = eta_hat[..., 0]
    xi0 = xi[..., 0]
    phi, _ = solve_elliptic_array(xi0, np.nan_to_num(y))
    c, sn = np.cos(phi), np.sin(phi)
    den = 1.0 - xi0 * c - y * sn
    xiv, ehv = xi[..., 1:], eta_hat[..., 1:]
    q = (rho * rho)[..., None] * (-xiv * (y - sn)[..., None] + ehv * (xi0 - c)[..., None])
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (xiv * c[..., None] + ehv * sn[..., None]) / (rho * den)[..., None]
    return q, p, den
