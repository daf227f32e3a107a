"""Certify every applicable claim on a batch of random instances.

Prints one line per (seed, variant) with the smallest margin seen and
exits nonzero if anything failed.
"""

import argparse
import sys
import time
from dataclasses import dataclass

from lipext import check_claims, clamp_bounded, extend
from lipext.extension import VARIANTS
from lipext.verification import random_instance


@dataclass
class Config:
    seeds: int = 20
    n: int = 40
    c_size: int = 15
    eps: float = 0.5
    clamp: bool = False


def sweep(cfg: Config):
    for seed in range(cfg.seeds):
        inst = random_instance(seed, cfg.n, cfg.c_size)
        for variant in VARIANTS:
            t0 = time.perf_counter()
            res = extend(variant, inst.space, inst.subset, cfg.eps)
            if cfg.clamp:
                res = clamp_bounded(res, inst.subset)
            rep = check_claims(inst.space, inst.subset, res)
            margins = [c.margin for c in rep.claims.values() if c.margin is not None]
            yield (seed, inst.params["geometry"], variant, rep.passed,
                   min(margins) if margins else None, time.perf_counter() - t0,
                   [cid for cid, c in rep.claims.items() if not c.passed])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=Config.seeds)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--c", type=int, default=Config.c_size)
    ap.add_argument("--eps", type=float, default=Config.eps)
    ap.add_argument("--clamp", action="store_true")
    a = ap.parse_args()
    cfg = Config(a.seeds, a.n, a.c, a.eps, a.clamp)
    bad = 0
    for seed, geo, variant, ok, margin, dt, failed in sweep(cfg):
        bad += not ok
        m = "-" if margin is None else f"{margin:.3e}"
        print(f"seed={seed:3d} {geo:8s} {variant:10s} {'ok ' if ok else 'FAIL'} "
              f"min_margin={m:>10} {dt*1e3:7.1f} ms {' '.join(failed)}")
    print(f"{bad} failing runs")
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
