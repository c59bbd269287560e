"""Multi-start constrained curvature minimization seeded by a grid scan."""
import argparse

import numpy as np

from keplerreg import scan
from keplerreg.hamiltonians import hx_arrays, locate_L1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, required=True)
    ap.add_argument("--extent", type=float, default=0.8)
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--starts", type=int, default=20)
    args = ap.parse_args()

    rep = scan.grid_scan(args.mu, extent=args.extent, n_per_axis=args.n)
    threshold = scan.threshold_estimate(rep)
    l1 = locate_L1(args.mu).position
    print(f"threshold {threshold}, L1 at {l1}")
    for start in scan.worst_samples(rep, threshold, args.starts):
        res = scan.constrained_minimize(args.mu, rep.c_cap, start)
        q = hx_arrays(res.point[None], args.mu).q[0]
        print(f"converged {res.converged} curvature {res.curvature:.4g} energy {res.energy:.6f} "
              f"rdHP {res.rdhp:.4f} |q - L1| {np.linalg.norm(q - l1):.3e} evals {res.evaluations}")


if __name__ == "__main__":
    main()
