"""Held-out residual of the transplant solver as two materials drift apart.

Compares NeoHookean(1, 1) with NeoHookean(1 + d, 1) transplanted by the
planted P*, for a range of d.  At d = 0 the residual sits at roundoff; it
should grow roughly linearly in d, which shows where the 1e-8 threshold cuts.

Usage: python3 scripts/solver_sweep.py [--seed N]
"""

from __future__ import annotations

import argparse

import numpy as np

from matg import groups as mg
from matg.constitutive import neo_hookean
from matg.fixtures import PLANTED_P
from matg.solver import SolverOptions, gauge_distance, solve_transplant


def main() -> None:
    ap = argparse.ArgumentParser(description="transplant solver residual sweep")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    opts = SolverOptions(seed=args.seed)
    m1 = neo_hookean(1.0, 1.0)
    print(f"{'d':>8} {'held-out':>10} {'train':>10} {'gauge':>10} converged")
    for d in [0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1]:
        m2 = neo_hookean(1.0 + d, 1.0).precomposed(PLANTED_P)
        sol = solve_transplant(m1, m2, opts=opts)
        g = gauge_distance(sol.P, PLANTED_P, mg.special_orthogonal(3))
        print(f"{d:8.0e} {sol.residual:10.2e} {sol.train_residual:10.2e} {g:10.2e} {sol.converged}")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
