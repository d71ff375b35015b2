#!/usr/bin/env python3
"""Grid-refinement study at fixed (alpha, Lambda/m0).

For each node count the fixed point is solved and Z^-1, m/m0 and the
mass-theorem margin are compared with the finest grid.

    python3 scripts/grid_convergence.py --log-lambda 10 --sizes 32,64,128,256,512,1024
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass, field

from dressqed import ModelParams, compute_observables, solve_fixed_point
from dressqed.config import parse_number


@dataclass
class StudyConfig:
    alpha: float = 1 / 137
    log_lambda: float = 10.0
    sizes: list = field(default_factory=lambda: [32, 64, 128, 256, 512, 1024])
    u_min_ratio: float = 1e-8


def run(cfg: StudyConfig):
    p = ModelParams.from_ratio(cfg.alpha, math.exp(cfg.log_lambda))
    results = {}
    for n in sorted(cfg.sizes):
        f, rep = solve_fixed_point(p, n_grid=n, u_min_ratio=cfg.u_min_ratio)
        results[n] = (rep, compute_observables(f, p, warn=False))
    ref = results[max(results)][1]
    print(f"{'N':>6} {'iter':>4} {'Z_inv':>20} {'dZ_inv':>9} {'m/m0':>20} {'dm':>9}")
    for n, (rep, obs) in results.items():
        print(f"{n:>6} {rep.iterations:>4} {obs.Z_inv:>20.15f} "
              f"{abs(obs.Z_inv - ref.Z_inv):>9.1e} {obs.m_over_m0:>20.15f} "
              f"{abs(obs.m_over_m0 - ref.m_over_m0):>9.1e}")
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", default="1/137")
    ap.add_argument("--log-lambda", type=float, default=10.0)
    ap.add_argument("--sizes", default="32,64,128,256,512,1024")
    args = ap.parse_args()
    run(StudyConfig(alpha=parse_number(args.alpha), log_lambda=args.log_lambda,
                    sizes=[int(s) for s in args.sizes.split(",")]))


if __name__ == "__main__":
    main()
