"""Uniform random sampling of the feasible set to locate non-positive curvature.

Grid scans can straddle thin pockets; this samples points at random, keeps the
non-positive ones above an rdHP floor and confirms each with Richardson
extrapolation.
"""
import argparse

import numpy as np

from keplerreg.curvature import curvature_batch
from keplerreg.hamiltonians import hx_arrays, locate_L1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, required=True)
    ap.add_argument("--extent", type=float, default=0.8)
    ap.add_argument("--samples", type=int, default=1_500_000)
    ap.add_argument("--rdhp-min", type=float, default=0.13)
    ap.add_argument("--show", type=int, default=15)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cap = locate_L1(args.mu).energy
    field = lambda a: hx_arrays(a, args.mu).energy
    pts = np.random.default_rng(args.seed).uniform(-args.extent, args.extent, (args.samples, 4))
    hx = hx_arrays(pts, args.mu)
    keep = hx.valid & (hx.energy <= cap) & (hx.rdhp <= 1.0)
    pts, rdhp, energy = pts[keep], hx.rdhp[keep], hx.energy[keep]
    curv = np.concatenate([curvature_batch(field, pts[i:i + 20000]) for i in range(0, len(pts), 20000)])
    hits = np.flatnonzero((curv <= 0) & (rdhp > args.rdhp_min))
    print(f"retained {len(pts)}, non-positive above rdHP {args.rdhp_min}: {len(hits)}")
    shown = hits[: args.show]
    if shown.size:
        rich = curvature_batch(field, pts[shown], richardson=True)
        for k, j in enumerate(shown):
            print(np.round(pts[j], 4), f"rdHP {rdhp[j]:.4f} E {energy[j]:.5f} "
                  f"curvature {curv[j]:.4g} richardson {rich[k]:.4g}")


if __name__ == "__main__":
    main()
