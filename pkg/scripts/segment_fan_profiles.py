"""Slope versus asymptotic profile at the hub of the segment fan.

For shrinking radii the pointed constant at 0 decays like 1/(n+1) while the
unpointed constant over the same ball stays at or above 1.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from lipext import profile
from lipext.verification import example21


@dataclass
class Config:
    N: int = 20
    samples: int = 5
    n_max: int = 15


def run(cfg: Config):
    inst = example21(cfg.N, cfg.samples)
    C, g = inst.subset.indices, inst.subset.values
    out = []
    for n in range(2, min(cfg.n_max, cfg.N) + 1):
        r = np.array([(n + 1) / n**2 + 1e-6])
        out.append((n, float(r[0]),
                    float(profile(inst.space, C, g, 0, r, "slope").constants[0]),
                    float(profile(inst.space, C, g, 0, r, "asymptotic").constants[0])))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=Config.N)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    a = ap.parse_args()
    print(f"{'n':>3} {'radius':>10} {'slope':>10} {'1/(n+1)':>10} {'asymptotic':>10}")
    for n, r, s, asym in run(Config(a.N, a.samples, a.n_max)):
        print(f"{n:3d} {r:10.6f} {s:10.6f} {1/(n+1):10.6f} {asym:10.4f}")


if __name__ == "__main__":
    main()
