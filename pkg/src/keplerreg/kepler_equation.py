"""Root solvers for the generalized Kepler equation.

Elliptic form:   phi = x sin(phi) - y cos(phi)
Hyperbolic form: phi = x sinh(phi) + y cosh(phi)

For images of physical states the pair (x, y) has norm equal to the orbital
eccentricity, so the elliptic equation has a unique root on the unit disk and
the hyperbolic equation a unique root for x**2 - y**2 >= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoRootInBracket, NonFinite

MAX_ITER = 100
STEP_TOL = 1e-14
RESIDUAL_TOL = 1e-13
HYPERBOLIC_LIMIT = 50.0


@dataclass(frozen=True)
class KeplerRoot:
    phi: float
    residual: float
    iterations: int


def _check_finite(x, y):
    if not (math.isfinite(x) and math.isfinite(y)):
        raise NonFinite(f"non-finite Kepler equation input ({x}, {y})")


def _bracketed_newton(f, fprime, a, b, start, scale=1.0):
    """Newton iteration kept inside the sign-change bracket [a, b].

    Falls back to bisection when the Newton step leaves the bracket or the
    derivative vanishes. ``scale`` multiplies the residual tolerance.
    """
    fa = f(a)
    if fa == 0.0:
        return KeplerRoot(a, 0.0, 0)
    fb = f(b)
    if fb == 0.0:
        return KeplerRoot(b, 0.0, 0)
    phi = min(max(start, a), b)
    for it in range(1, MAX_ITER + 1):
        fx = f(phi)
        if fx == 0.0:
            return KeplerRoot(phi, 0.0, it)
        if (fx < 0) == (fa < 0):
            a, fa = phi, fx
        else:
            b = phi
        d = fprime(phi)
        new = phi - fx / d if d != 0.0 else math.nan
        if not (a <= new <= b):
            new = 0.5 * (a + b)
        step = new - phi
        phi = new
        if abs(step) < STEP_TOL and abs(fx) < RESIDUAL_TOL * scale:
            break
        if b - a < STEP_TOL * max(1.0, abs(phi)) and abs(f(phi)) < RESIDUAL_TOL * scale:
            break
    return KeplerRoot(phi, f(phi), it)


def _elliptic_f(x, y):
    return lambda t: t - x * math.sin(t) + y * math.cos(t)


def _elliptic_fprime(x, y):
    return lambda t: 1.0 - x * math.cos(t) - y * math.sin(t)


def solve_elliptic(x: float, y: float) -> KeplerRoot:
    """Solve phi = x sin(phi) - y cos(phi).

    Every root lies in [-r, r] with r = hypot(x, y). When r > 1 several roots
    may exist and the one of smallest magnitude is returned.
    """
    x, y = float(x), float(y)
    _check_finite(x, y)
    r = math.hypot(x, y)
    if r == 0.0:
        return KeplerRoot(0.0, 0.0, 0)
    f = _elliptic_f(x, y)
    fp = _elliptic_fprime(x, y)
    if r <= 1.0:
        return _bracketed_newton(f, fp, -r, r, -y)

    grid = np.linspace(-r, r, 2049)
    vals = grid - x * np.sin(grid) + y * np.cos(grid)
    exact = np.flatnonzero(vals == 0.0)
    change = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    best = None
    best_dist = math.inf
    for k in exact:
        if abs(grid[k]) < best_dist:
            best, best_dist = (grid[k], grid[k]), abs(grid[k])
    for k in change:
        lo, hi = grid[k], grid[k + 1]
        dist = 0.0 if lo <= 0.0 <= hi else min(abs(lo), abs(hi))
        if dist < best_dist:
            best, best_dist = (lo, hi), dist
    if best is None:
        # f(-r) <= 0 <= f(r) always holds, so this only triggers on roundoff.
        best = (-r, r)
    lo, hi = float(best[0]), float(best[1])
    if lo == hi:
        return KeplerRoot(lo, f(lo), 0)
    return _bracketed_newton(f, fp, lo, hi, 0.5 * (lo + hi))


def solve_elliptic_array(x, y):
    """Vectorized elliptic solve for inputs on the closed unit disk.

    Returns ``(phi, residual)``. Points with hypot(x, y) > 1 are delegated to
    the scalar solver so the smallest-magnitude root rule still applies.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NonFinite("non-finite Kepler equation input")
    r = np.hypot(x, y)
    outside = r > 1.0
    r_in = np.where(outside, 0.0, r)
    lo = -r_in
    hi = r_in.copy()
    phi = np.clip(-np.where(outside, 0.0, y), lo, hi)
    active = ~outside
    for _ in range(MAX_ITER):
        s, c = np.sin(phi), np.cos(phi)
        f = phi - x * s + y * c
        fp = 1.0 - x * c - y * s
        lo = np.where(active & (f < 0), phi, lo)
        hi = np.where(active & (f > 0), phi, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = phi - f / fp
        ok = (fp > 0) & (newton >= lo) & (newton <= hi)
        new = np.where(ok, newton, 0.5 * (lo + hi))
        new = np.where(active, new, phi)
        step = new - phi
        phi = new
        done = (np.abs(step) < STEP_TOL) & (np.abs(f) < RESIDUAL_TOL)
        done |= hi - lo < STEP_TOL * np.maximum(1.0, np.abs(phi))
        active &= ~done
        if not active.any():
            break
    if outside.any():
        for idx in zip(*np.nonzero(outside)):
            phi[idx] = solve_elliptic(x[idx], y[idx]).phi
    residual = phi - x * np.sin(phi) + y * np.cos(phi)
    return phi, residual


def solve_hyperbolic(x: float, y: float) -> KeplerRoot:
    """Solve phi = x sinh(phi) + y cosh(phi) by safeguarded Newton.

    The bracket is grown from zero towards the sign change, doubling up to
    |phi| = 50; no sign change there means the input is not the image of a
    physical state.
    """
    x, y = float(x), float(y)
    _check_finite(x, y)

    def g(t):
        return t - x * math.sinh(t) - y * math.cosh(t)

    def gp(t):
        return 1.0 - x * math.cosh(t) - y * math.sinh(t)

    g0 = g(0.0)
    if g0 == 0.0:
        return KeplerRoot(0.0, 0.0, 0)
    direction = 1.0 if g0 > 0 else -1.0
    inner, outer = 0.0, 0.5 * direction
    while True:
        if (g(outer) > 0) != (g0 > 0):
            break
        if abs(outer) >= HYPERBOLIC_LIMIT:
            raise NoRootInBracket(f"no root of the hyperbolic equation within |phi| <= {HYPERBOLIC_LIMIT:g}")
        inner, outer = outer, direction * min(2.0 * abs(outer), HYPERBOLIC_LIMIT)
    a, b = sorted((inner, outer))
    scale = max(1.0, abs(x * math.sinh(b)) + abs(y * math.cosh(b)))
    return _bracketed_newton(g, gp, a, b, 0.5 * (a + b), scale=scale)


@dataclass
class GridReport:
    """Kepler function sampled on a square grid.

    ``phi[i, j]`` is the root at ``(xs[i], ys[j])``; the gradient arrays use
    centered differences in the interior and one-sided ones on the edges.
    """

    xs: np.ndarray
    ys: np.ndarray
    phi: np.ndarray
    grad_x: np.ndarray
    grad_y: np.ndarray
    extrema: dict = field(default_factory=dict)

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                yield float(x), float(y), float(self.phi[i, j])


def _grid_axis(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    return np.round(np.linspace(lo, hi, n), 12)


def kepler_function_grid(lo: float, hi: float, step: float) -> GridReport:
    if not lo < hi:
        raise ValueError("grid requires lo < hi")
    if not step > 0:
        raise ValueError("grid step must be positive")
    axis = _grid_axis(lo, hi, step)
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    phi = np.empty_like(X)
    for idx in np.ndindex(X.shape):
        phi[idx] = solve_elliptic(X[idx], Y[idx]).phi
    grad_x, grad_y = np.gradient(phi, step, step)
    magnitude = np.hypot(grad_x, grad_y)

    def at(arr, fn):
        k = np.unravel_index(fn(arr), arr.shape)
        return {"value": float(arr[k]), "x": float(axis[k[0]]), "y": float(axis[k[1]])}

    extrema = {
        "phi_min": at(phi, np.argmin),
        "phi_max": at(phi, np.argmax),
        "grad_x_min": at(grad_x, np.argmin),
        "grad_x_max": at(grad_x, np.argmax),
        "grad_y_min": at(grad_y, np.argmin),
        "grad_y_max": at(grad_y, np.argmax),
        "grad_norm_max": at(magnitude, np.argmax),
    }
    return GridReport(axis, axis.copy(), phi, grad_x, grad_y, extrema)
