"""State types shared across the library.

Units are canonical (GM = 1). Planar states are embedded in three dimensions
with a zero third component.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CollisionState, ZeroEnergy

NEG = "neg"
POS = "pos"

ENERGY_DEAD_ZONE = 1e-14


def _vec(v, n):
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size < n:
        a = np.concatenate([a, np.zeros(n - a.size)])
    if a.size != n:
        raise ValueError(f"expected a {n}-vector, got {a.size} components")
    a.setflags(write=False)
    return a


def minkowski(a, b, sign):
    """Inner product on R^4: Euclidean for ``neg``, signature (+,-,-,-) for ``pos``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if sign == NEG:
        return np.sum(a * b, axis=-1)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


@dataclass(frozen=True, eq=False)
class CartesianState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _vec(self.q, 3))
        object.__setattr__(self, "p", _vec(self.p, 3))

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.q))

    @property
    def energy(self) -> float:
        return 0.5 * float(self.p @ self.p) - 1.0 / self.radius

    @property
    def energy_sign(self) -> str:
        return NEG if self.energy < 0 else POS

    def check(self):
        """Raise if the state lies outside the domain of both map branches."""
        if self.radius == 0.0:
            raise CollisionState("q = 0 is a collision state")
        if abs(self.energy) < ENERGY_DEAD_ZONE:
            raise ZeroEnergy("parabolic state (H = 0) has no regularized image")
        return self

    def to_json(self) -> dict:
        return {"q": self.q.tolist(), "p": self.p.tolist()}

    @classmethod
    def from_json(cls, d) -> "CartesianState":
        return cls(d["q"], d["p"])


@dataclass(frozen=True, eq=False)
class RSState:
    r: np.ndarray
    s: np.ndarray
    sign: str = NEG

    def __post_init__(self):
        object.__setattr__(self, "r", _vec(self.r, 4))
        object.__setattr__(self, "s", _vec(self.s, 4))


@dataclass(frozen=True, eq=False)
class SphereState:
    """Point of the cotangent bundle of the 3-sphere (or of the hyperboloid).

    ``phi`` is the rotation angle cached by the forward map; it is a
    diagnostic only.
    """

    xi: np.ndarray
    eta: np.ndarray
    sign: str = NEG
    phi: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "xi", _vec(self.xi, 4))
        object.__setattr__(self, "eta", _vec(self.eta, 4))
        if self.sign not in (NEG, POS):
            raise ValueError(f"sign must be '{NEG}' or '{POS}'")

    @property
    def eta_sq(self) -> float:
        """Square of eta in the metric of the branch (negative for ``pos``)."""
        return float(minkowski(self.eta, self.eta, self.sign))

    @property
    def eta_norm(self) -> float:
        """sqrt(|eta^2|): the Euclidean norm, or sqrt(-eta^2) on the hyperbolic branch."""
        return math.sqrt(abs(self.eta_sq))

    @property
    def energy(self) -> float:
        return -0.5 / self.eta_sq

    def to_json(self) -> dict:
        return {"xi": self.xi.tolist(), "eta": self.eta.tolist(), "sign": self.sign}

    @classmethod
    def from_json(cls, d) -> "SphereState":
        return cls(d["xi"], d["eta"], d.get("sign", NEG))


@dataclass(frozen=True, eq=False)
class ConservedQuantities:
    L: np.ndarray
    M: np.ndarray
    H: float


def conserved(state: CartesianState) -> ConservedQuantities:
    """Angular momentum, rescaled Runge-Lenz vector and energy."""
    q, p = state.q, state.p
    r = state.radius
    H = state.energy
    L = np.cross(q, p)
    qp = float(q @ p)
    M = (q / r + p * qp - q * float(p @ p)) / math.sqrt(abs(2.0 * H))
    return ConservedQuantities(L, M, H)


def eccentricity(state: CartesianState) -> float:
    """Eccentricity from sqrt(1 + 2 H |L|^2)."""
    H = state.energy
    L = np.cross(state.q, state.p)
    return math.sqrt(max(0.0, 1.0 + 2.0 * H * float(L @ L)))


def state_from_json(d):
    if "q" in d:
        return CartesianState.from_json(d)
    return SphereState.from_json(d)
