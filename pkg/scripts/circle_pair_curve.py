"""Circle-pair potential over tau, normalized by its value at tau = 1, written as CSV."""

import argparse
import csv
import sys

import numpy as np

from twoloop.potentials import lpot_circles


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--range", default="0.05:5", help="tau range A:B")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--out", default=None)
    args = p.parse_args()
    lo, hi = map(float, args.range.split(":"))
    taus = np.linspace(lo, hi, args.points)
    ref = lpot_circles(1.0)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["tau", "normalized"])
    for t in taus:
        w.writerow([f"{t:.6g}", f"{lpot_circles(t) - ref:.12g}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
