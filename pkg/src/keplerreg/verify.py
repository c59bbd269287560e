"""Randomized invariant suites behind the ``verify`` command.

Every suite draws states from a seeded generator and returns the largest
residual it saw together with the tolerance it is judged against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lsmap, orbit
from .curvature import closed_form_CK, closed_form_CRt, hk_derivatives, hr_derivatives, tangential_curvature
from .curvature import numeric_hessian
from .hamiltonians import eval_HR, eval_HX
from .identities import verify_chain_identities, verify_identities
from .phase import CartesianState
from .projections import ComplexPair


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_residual: float
    tolerance: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_json(self) -> dict:
        return {"suite": self.name, "max_residual": self.max_residual,
                "tolerance": self.tolerance, "samples": self.samples, "ok": self.ok}


def random_elliptic_states(rng, n, min_binding=1e-3):
    """Bound states with q in [0.1, 3]^3 and p in [-1.5, 1.5]^3 (rejection sampled)."""
    out = []
    while len(out) < n:
        q = rng.uniform(0.1, 3.0, 3)
        p = rng.uniform(-1.5, 1.5, 3)
        s = CartesianState(q, p)
        if s.energy < -min_binding:
            out.append(s)
    return out


def random_hyperbolic_states(rng, n, energy=(0.05, 2.0), max_angle=3.0):
    """Unbound states: q in [0.1, 3]^3, random momentum direction, H uniform in ``energy``.

    States whose rotation angle sqrt(2H) q.p exceeds ``max_angle`` are
    rejected: the sphere coordinates grow like cosh(phi) while |eta| stays
    O(1), so double precision cannot resolve them much beyond that.
    """
    out = []
    while len(out) < n:
        q = rng.uniform(0.1, 3.0, 3)
        H = rng.uniform(*energy)
        d = rng.normal(size=3)
        speed = math.sqrt(2.0 * (H + 1.0 / np.linalg.norm(q)))
        p = speed * d / np.linalg.norm(d)
        if abs(math.sqrt(2.0 * H) * float(q @ p)) <= max_angle:
            out.append(CartesianState(q, p))
    return out


def random_eccentric_states(rng, n, e_max=0.9):
    """Bound states with eccentricity at most ``e_max``."""
    out = []
    while len(out) < n:
        s = random_elliptic_states(rng, 1)[0]
        L = np.cross(s.q, s.p)
        if 1.0 + 2.0 * s.energy * float(L @ L) <= e_max**2:
            out.append(s)
    return out


def random_chain_points(rng, n, extent=1.5, min_z=1e-3):
    pts = []
    while len(pts) < n:
        v = rng.uniform(-extent, extent, 4)
        if math.hypot(v[2], v[3]) > min_z:
            pts.append(v)
    return np.array(pts)


def _state_error(a: CartesianState, b: CartesianState):
    return max(float(np.max(np.abs(a.q - b.q))), float(np.max(np.abs(a.p - b.p))))


def _sphere_error(a, b):
    """Componentwise error relative to the size of the reference sphere state."""
    size = max(1.0, float(np.max(np.abs(b.xi))), float(np.max(np.abs(b.eta))))
    return max(float(np.max(np.abs(a.xi - b.xi))), float(np.max(np.abs(a.eta - b.eta)))) / size


def suite_round_trip(states, tol=1e-9, name="round trip"):
    worst = 0.0
    for s in states:
        sp = lsmap.forward(s)
        back = lsmap.inverse(sp)
        worst = max(worst, _state_error(back, s), _sphere_error(lsmap.forward(back), sp))
    return SuiteResult(name, worst, tol, len(states))


def suite_identities(states, tol=1e-10, name="LS identities"):
    worst = 0.0
    for s in states:
        rep = verify_identities(s, tol)
        worst = max(worst, rep.max_residual / rep.scale)
    return SuiteResult(name, worst, tol, len(states))


def suite_chain_identities(points, tol=1e-10):
    worst = 0.0
    for v in points:
        rep = verify_chain_identities(ComplexPair.from_point(v), tol)
        worst = max(worst, rep.max_residual / rep.scale)
    return SuiteResult("chain identities", worst, tol, len(points))


def suite_pipeline(points, tol=1e-9):
    worst = 0.0
    for v in points:
        cp = ComplexPair.from_point(v)
        worst = max(worst, abs(eval_HX(cp, 0.0).energy - eval_HR(cp)))
    return SuiteResult("pipeline H_X(mu=0) = H_R", worst, tol, len(points))


def _points_with_X(rng, n, lo=0.5, hi=3.0):
    d = rng.normal(size=(n, 4))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * np.sqrt(rng.uniform(lo, hi, n))[:, None]


def suite_curvature_kepler(rng, n, tol=1e-4):
    from .hamiltonians import hk_arrays

    worst = 0.0
    for v in _points_with_X(rng, n):
        cp = ComplexPair.from_point(v)
        num = tangential_curvature(lambda x: float(hk_arrays(x)), v)
        worst = max(worst, abs(num / closed_form_CK(cp) - 1.0))
    return SuiteResult("curvature H_K vs closed form", worst, tol, n)


def suite_curvature_rotating(rng, n, tol=1e-3):
    from .hamiltonians import hr_arrays

    worst = 0.0
    for v in _points_with_X(rng, n):
        cp = ComplexPair.from_point(v)
        exact = closed_form_CRt(cp)
        num = tangential_curvature(lambda x: float(hr_arrays(x)), v)
        worst = max(worst, abs(num - exact) / max(abs(exact), 1e-300))
    return SuiteResult("curvature H_R vs closed form", worst, tol, n)


def suite_closed_form_derivatives(rng, n, tol=1e-6):
    """Closed-form Hessians of H_K and H_R against central differences."""
    from .hamiltonians import hk_arrays, hr_arrays

    worst = 0.0
    for v in _points_with_X(rng, n):
        for f, d in ((hk_arrays, hk_derivatives), (hr_arrays, hr_derivatives)):
            h = numeric_hessian(lambda x: float(f(x)), v)
            worst = max(worst, float(np.max(np.abs(h - d(v)[1]))) / max(1.0, float(np.max(np.abs(h)))))
    return SuiteResult("closed-form Hessians", worst, tol, n)


def suite_propagation(states, tol=1e-9):
    worst = 0.0
    for s in states:
        back = orbit.propagate(s, orbit.period(s.energy))
        worst = max(worst, _state_error(back, s))
    return SuiteResult("propagation periodicity", worst, tol, len(states))


def run_all(samples=1000, seed=0, tolerance=1e-10):
    rng = np.random.default_rng(seed)
    elliptic = random_elliptic_states(rng, samples)
    hyperbolic = random_hyperbolic_states(rng, max(1, samples // 10))
    chains = random_chain_points(rng, samples)
    feasible = chains[: max(1, samples // 10)]
    small = max(5, samples // 50)
    return [
        suite_round_trip(elliptic, name="round trip (elliptic)"),
        suite_round_trip(hyperbolic, name="round trip (hyperbolic)"),
        suite_identities(elliptic, tolerance, name="identities (elliptic)"),
        suite_identities(hyperbolic, tolerance, name="identities (hyperbolic)"),
        suite_chain_identities(chains, tolerance),
        suite_pipeline(feasible),
        suite_curvature_kepler(rng, small),
        suite_curvature_rotating(rng, small),
        suite_closed_form_derivatives(rng, small),
        suite_propagation(random_eccentric_states(rng, small)),
    ]
