"""Tabulate the Kepler function on a square grid and report its extrema."""
import argparse
import json

from keplerreg.kepler_equation import kepler_function_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lo", type=float, default=-1.0)
    ap.add_argument("--hi", type=float, default=1.0)
    ap.add_argument("--step", type=float, default=0.01)
    args = ap.parse_args()
    report = kepler_function_grid(args.lo, args.hi, args.step)
    print(json.dumps(report.extrema, indent=2))


if __name__ == "__main__":
    main()
