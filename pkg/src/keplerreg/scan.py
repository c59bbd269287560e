"""Convexity evidence for the regularized restricted three-body problem.

Two numerical methods: a grid scan of (w, z)-space that records the
tangential curvature of the pulled-back Hamiltonian at every retained grid
point, and a penalized simplex descent that looks for local curvature minima
inside the feasible set {energy <= c_cap, rdHP <= 1}.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import minimize

from .curvature import curvature_batch
from .errors import AllNegative, InfeasibleStart
from .hamiltonians import check_mu, hx_arrays, locate_L1

BIN_WIDTH = 0.01
CHUNK = 20_000
CSV_COLUMNS = ("w1", "w2", "z1", "z2", "q1", "q2", "energy", "rdHP", "curvature")


@dataclass(frozen=True)
class CurvatureSample:
    point: np.ndarray
    q: np.ndarray
    energy: float
    rdhp: float
    curvature: float

    def row(self):
        return [*map(float, self.point), *map(float, self.q), self.energy, self.rdhp, self.curvature]


@dataclass(frozen=True)
class CurvatureBin:
    lo: float
    hi: float
    min_curvature: float
    argmin: np.ndarray
    count: int


@dataclass
class ScanReport:
    mu: float
    c_cap: float
    extent: float
    n_per_axis: int
    bins: list[CurvatureBin]
    negatives: list[CurvatureSample]
    evaluated: int
    skipped: int
    retained: int
    samples: dict = field(default_factory=dict, repr=False)

    def summary(self) -> dict:
        return {
            "mu": self.mu,
            "c_cap": self.c_cap,
            "extent": self.extent,
            "n_per_axis": self.n_per_axis,
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "retained": self.retained,
            "non_positive": len(self.negatives),
            "max_non_positive_rdhp": max((s.rdhp for s in self.negatives), default=None),
            "bins": [
                {"lo": b.lo, "hi": b.hi, "min_curvature": b.min_curvature,
                 "argmin": [float(v) for v in b.argmin], "count": b.count}
                for b in self.bins
            ],
        }

    def write_csv(self, path):
        s = self.samples
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for k in range(len(s["rdhp"])):
                writer.writerow([repr(float(v)) for v in (*s["point"][k], *s["q"][k],
                                 s["energy"][k], s["rdhp"][k], s["curvature"][k])])


def grid_axis(extent: float, n: int) -> np.ndarray:
    return np.linspace(-extent, extent, n)


def _field(mu):
    return lambda pts: hx_arrays(pts, mu).energy


def _scan_chunk(bounds, mu, c_cap, axis, richardson):
    """Evaluate grid points with flat indices in [start, stop)."""
    start, stop = bounds
    n = len(axis)
    flat = np.arange(start, stop)
    points = axis[np.stack(np.unravel_index(flat, (n,) * 4), axis=-1)]
    hx = hx_arrays(points, mu)
    keep = hx.valid & (hx.energy <= c_cap) & (hx.rdhp <= 1.0)
    curv = curvature_batch(_field(mu), points[keep], richardson) if keep.any() else np.empty(0)
    finite = np.isfinite(curv)
    idx = np.flatnonzero(keep)[finite]
    skipped = int(np.count_nonzero(~hx.valid)) + int(np.count_nonzero(~finite))
    return {
        "index": flat[idx],
        "point": points[idx],
        "q": hx.q[idx],
        "energy": hx.energy[idx],
        "rdhp": hx.rdhp[idx],
        "curvature": curv[finite],
        "skipped": skipped,
    }


def _bins(rdhp, curvature, points):
    nbins = int(round(1.0 / BIN_WIDTH))
    which = np.minimum((rdhp / BIN_WIDTH).astype(int), nbins - 1)
    out = []
    for b in range(nbins):
        members = np.flatnonzero(which == b)
        if members.size == 0:
            continue
        k = members[np.argmin(curvature[members])]
        out.append(CurvatureBin(round(b * BIN_WIDTH, 10), round((b + 1) * BIN_WIDTH, 10),
                                float(curvature[k]), points[k].copy(), int(members.size)))
    return out


def grid_scan(mu, c_cap=None, extent=1.5, n_per_axis=21, workers=1, richardson=False) -> ScanReport:
    """Curvature of the pulled-back three-body Hamiltonian on the grid [-extent, extent]^4.

    Points where the chain fails are counted as skipped. Retained samples
    (energy <= c_cap, rdHP <= 1) are binned by rdHP; the result does not
    depend on ``workers`` because chunks are merged by grid index.
    """
    mu = check_mu(mu)
    if not extent > 0:
        raise ValueError("extent must be positive")
    if n_per_axis < 3:
        raise ValueError("need at least 3 points per axis")
    if c_cap is None:
        c_cap = locate_L1(mu).energy
    axis = grid_axis(extent, n_per_axis)
    total = n_per_axis**4
    chunks = [(a, min(a + CHUNK, total)) for a in range(0, total, CHUNK)]
    job = partial(_scan_chunk, mu=mu, c_cap=c_cap, axis=axis, richardson=richardson)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, chunks))
    else:
        parts = [job(c) for c in chunks]
    parts.sort(key=lambda part: part["index"][0] if part["index"].size else total)

    keys = ("index", "point", "q", "energy", "rdhp", "curvature")
    samples = {k: np.concatenate([part[k] for part in parts]) for k in keys}
    order = np.argsort(samples["index"], kind="stable")
    samples = {k: v[order] for k, v in samples.items()}

    neg = np.flatnonzero(samples["curvature"] <= 0)
    negatives = [
        CurvatureSample(samples["point"][k], samples["q"][k], float(samples["energy"][k]),
                        float(samples["rdhp"][k]), float(samples["curvature"][k]))
        for k in neg
    ]
    return ScanReport(
        mu=mu,
        c_cap=float(c_cap),
        extent=float(extent),
        n_per_axis=int(n_per_axis),
        bins=_bins(samples["rdhp"], samples["curvature"], samples["point"]),
        negatives=negatives,
        evaluated=total,
        skipped=sum(part["skipped"] for part in parts),
        retained=int(samples["rdhp"].size),
        samples=samples,
    )


def threshold_estimate(report: ScanReport) -> float:
    """Smallest bin boundary above which every non-empty bin has a positive minimum."""
    if not report.bins:
        raise ValueError("report has no bins")
    bad = [b for b in report.bins if b.min_curvature <= 0]
    if not bad:
        return 0.0
    top = max(bad, key=lambda b: b.hi)
    if top is report.bins[-1]:
        raise AllNegative(f"the highest non-empty bin ({top.lo}, {top.hi}] is non-positive")
    return top.hi


@dataclass(frozen=True)
class MinimizeResult:
    start: np.ndarray
    point: np.ndarray
    curvature: float
    converged: bool
    energy: float
    rdhp: float
    energy_residual: float
    rdhp_residual: float
    evaluations: int

    def to_json(self) -> dict:
        return {
            "start": [float(v) for v in self.start],
            "point": [float(v) for v in self.point],
            "curvature": self.curvature,
            "converged": self.converged,
            "energy": self.energy,
            "rdHP": self.rdhp,
            "energy_residual": self.energy_residual,
            "rdHP_residual": self.rdhp_residual,
            "evaluations": self.evaluations,
        }


PENALTY_WEIGHTS = tuple(10.0**k for k in range(2, 9))
SIMPLEX_TOL = 1e-8


def _evaluate(point, mu):
    pts = np.atleast_2d(point)
    hx = hx_arrays(pts, mu)
    if not hx.valid[0]:
        return math.nan, math.nan, math.nan
    curv = float(curvature_batch(_field(mu), pts)[0])
    return curv, float(hx.energy[0]), float(hx.rdhp[0])


def constrained_minimize(mu, c_cap, start, max_iter=4000) -> MinimizeResult:
    """Local curvature minimum subject to energy <= c_cap and rdHP <= 1.

    Each stage minimizes asinh(curvature) plus a quadratic exterior penalty
    with Nelder-Mead; the penalty weight grows from 1e2 to 1e8 by factors of
    10 and every stage restarts from the previous optimum. asinh is monotone,
    so it keeps the constrained minimizers while taming the many decades
    spanned by the curvature near collisions.
    """
    mu = check_mu(mu)
    if c_cap is None:
        c_cap = locate_L1(mu).energy
    start = np.asarray(start, dtype=float)
    curv, energy, rdhp = _evaluate(start, mu)
    if not np.isfinite(curv) or energy > c_cap or rdhp > 1.0:
        raise InfeasibleStart(f"start {start.tolist()} is outside the feasible set")

    evaluations = 0

    def objective(x, weight):
        nonlocal evaluations
        evaluations += 1
        c, e, r = _evaluate(x, mu)
        if not np.isfinite(c):
            return math.inf
        violation = max(0.0, e - c_cap) ** 2 + max(0.0, r - 1.0) ** 2
        return math.asinh(c) + weight * violation

    x = start
    converged = True
    for weight in PENALTY_WEIGHTS:
        res = minimize(objective, x, args=(weight,), method="Nelder-Mead",
                       options={"xatol": SIMPLEX_TOL / 2, "fatol": math.inf,
                                "maxiter": max_iter, "maxfev": 2 * max_iter})
        x = res.x
        stage_ok = bool(res.success)
        if "final_simplex" in res:
            simplex = res.final_simplex[0]
            diameter = max(np.linalg.norm(a - b) for a in simplex for b in simplex)
            stage_ok = stage_ok and diameter < SIMPLEX_TOL
        converged = stage_ok
    curv, energy, rdhp = _evaluate(x, mu)
    return MinimizeResult(
        start=start,
        point=x,
        curvature=curv,
        converged=converged and np.isfinite(curv),
        energy=energy,
        rdhp=rdhp,
        energy_residual=max(0.0, energy - c_cap),
        rdhp_residual=max(0.0, rdhp - 1.0),
        evaluations=evaluations,
    )


def worst_samples(report: ScanReport, rdhp_min: float, count: int = 20) -> np.ndarray:
    """Grid points with the lowest curvature among samples with rdHP > rdhp_min."""
    s = report.samples
    pool = np.flatnonzero(s["rdhp"] > rdhp_min)
    order = pool[np.argsort(s["curvature"][pool], kind="stable")]
    return s["point"][order[:count]]


def read_scan_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {name: np.array([float(r[name]) for r in rows]) for name in CSV_COLUMNS}
