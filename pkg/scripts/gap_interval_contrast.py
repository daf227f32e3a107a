"""Local constants of the three extensions across a unit gap, as h and eps vary.

The data is 0 on the grid over [-1, 0] and 1 on the grid over [1, 2], so
McShane fills the gap with slope 1 right up to its edges even though g is
flat there. The penalized extensions stay close to flat near the edges.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from lipext import extend, profile
from lipext.verification import example22


@dataclass
class Config:
    hs: tuple = (0.02, 0.01, 0.005)
    epsilons: tuple = (0.05, 0.5, 2.0)
    radius: float = 0.05
    anchor: float = 1.0


def run(cfg: Config):
    rows = []
    for h in cfg.hs:
        inst = example22(h)
        m = int(round(1 / h))
        allX = np.arange(inst.space.n)
        r = np.array([cfg.radius])
        for eps in cfg.epsilons:
            row = {"h": h, "eps": eps}
            for variant, x, kind in (("mcshane", m, "slope"), ("slope", m, "slope"),
                                     ("descending", 2 * m, "descending")):
                f = extend(variant, inst.space, inst.subset, eps, cfg.anchor).f
                row[variant] = float(profile(inst.space, allX, f, x, r, kind).constants[0])
            rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=Config.radius)
    ap.add_argument("--anchor", type=float, default=Config.anchor)
    args = ap.parse_args()
    cfg = Config(radius=args.radius, anchor=args.anchor)
    print(f"{'h':>6} {'eps':>6} {'mcshane':>10} {'slope':>10} {'descending':>10}")
    for row in run(cfg):
        print(f"{row['h']:6.3f} {row['eps']:6.2f} {row['mcshane']:10.6f} "
              f"{row['slope']:10.6f} {row['descending']:10.6f}")
    print(f"(entries <= 1/9 = {1/9:.6f} expected for the penalized variants at eps = 0.5)")


if __name__ == "__main__":
    main()
