"""log g(tau) for a few trivializations side by side, plus their classifications."""

import argparse
import csv
import sys

import numpy as np

from twoloop.cft import classify_minimizer, criterion, make_character_trivialization, make_zeta_trivialization

CASES = {
    "chars_c0.3_h0": lambda: make_character_trivialization(0.3, [(0.0, 1)]),
    "chars_c0.3_h0.2": lambda: make_character_trivialization(0.3, [(0.2, 1)]),
    "chars_c1_h1": lambda: make_character_trivialization(1.0, [(1.0, 1)]),
    "zeta_c1": lambda: make_zeta_trivialization(1.0),
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=80)
    p.add_argument("--out", default=None)
    args = p.parse_args()
    trivs = {k: make() for k, make in CASES.items()}
    taus = np.geomspace(0.05, 20.0, args.points)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["tau", *trivs])
    for x in taus:
        w.writerow([f"{x:.6g}", *(f"{criterion(t, x):.12g}" for t in trivs.values())])
    if args.out:
        fh.close()
    for name, t in trivs.items():
        r = classify_minimizer(t)
        star = "" if r.tau_star is None else f" tau*={r.tau_star:.12f}"
        print(f"{name}: {r.classification}{star}", file=sys.stderr)


if __name__ == "__main__":
    main()
