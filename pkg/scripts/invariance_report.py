"""Route agreement, Moebius invariance and Grunsky gaps over a family of perturbed circle pairs."""

import argparse

import numpy as np

from twoloop.loops import Loop, TwoLoopConfig, apply_moebius, random_moebius
from twoloop.potentials import grunsky, lpot_two, lpot_two_via_lk
from twoloop.uniformize import annulus_uniformize


def wobbly(radius, amp, k, phase=0.0, n=256):
    t = 2 * np.pi * np.arange(n) / n
    return Loop.from_samples(radius * (1 + amp * np.cos(k * t + phase)) * np.exp(1j * t))


def family():
    return [
        TwoLoopConfig(wobbly(0.3, 0.04, 3), wobbly(1.0, 0.05, 2)),
        TwoLoopConfig(wobbly(0.5, 0.05, 2, 0.7), wobbly(1.0, 0.03, 4)),
        TwoLoopConfig(wobbly(0.2, 0.08, 5), wobbly(1.0, 0.02, 3, 1.1)),
        TwoLoopConfig(wobbly(0.6, 0.02, 3), wobbly(1.2, 0.04, 5)),
    ]


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--moebius", type=int, default=5)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'tau':>10} {'total':>14} {'lk - total':>11} {'max moebius dev':>16} {'grunsky gap':>12}")
    for cfg in family():
        u = annulus_uniformize(cfg)
        total = lpot_two(cfg).total
        route = lpot_two_via_lk(cfg) - total
        dev = max(abs(lpot_two(apply_moebius(random_moebius(rng, cfg), cfg)).total - total)
                  for _ in range(args.moebius))
        gap = grunsky(u, 128).gap
        print(f"{u.tau:10.6f} {total:14.9f} {route:11.2e} {dev:16.2e} {gap:12.2e}")


if __name__ == "__main__":
    main()
