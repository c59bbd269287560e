"""Threshold estimates of the curvature scan across mass ratios and grid sizes.

Example: python scripts/scan_thresholds.py --mu 9.536e-4 1.216e-2 --grid 0.8:30 0.8:32 1.5:45
"""
import argparse
import time

from keplerreg import scan
from keplerreg.errors import AllNegative


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mu", type=float, nargs="+", default=[0.0, 9.536e-4, 1.216e-2])
    ap.add_argument("--grid", nargs="+", default=["0.8:32"], help="extent:points_per_axis")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    print("mu extent n retained non_positive max_non_positive_rdHP threshold seconds")
    for mu in args.mu:
        for spec in args.grid:
            extent, n = spec.split(":")
            t0 = time.time()
            rep = scan.grid_scan(mu, extent=float(extent), n_per_axis=int(n), workers=args.workers)
            try:
                thr = scan.threshold_estimate(rep)
            except AllNegative:
                thr = "all-negative"
            top = max((s.rdhp for s in rep.negatives), default=float("nan"))
            print(f"{mu:g} {extent} {n} {rep.retained} {len(rep.negatives)} {top:.3f} {thr} "
                  f"{time.time() - t0:.0f}")


if __name__ == "__main__":
    main()
