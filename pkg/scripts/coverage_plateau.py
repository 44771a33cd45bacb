"""Measure how far the per-symbol hill climb can push probe-net coverage.

Full coverage of the probe net is what search_omega0 needs to accept; at the
default desk-scale constants the steering budget (|gamma| c1 rho against
t-windows of width ~r_g) tops out well short of that. This script records
the plateau so the gap is a number, not a guess.

Usage: python3 scripts/coverage_plateau.py [--budget 400] [--seeds 3]
"""

import argparse
import time

from ifsproj import RunConfig, build_candidate, build_E, search_omega0, SliceBuilder


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--budget", type=int, default=400)
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()

    cfg = RunConfig(ifs="sierpinski")
    t0 = time.time()
    res = cfg.resolve()
    geom = cfg.geometry()
    E = build_E(res.ifs, cfg.n_theta, cfg.rho, res.delta, epsilon=cfg.epsilon)
    slices = SliceBuilder(res.ifs, E, geom, res.slice_params).all_rows()
    cand = build_candidate(res.ifs, E, slices, cfg.rho, geom=geom)
    print(f"[{time.time()-t0:6.1f}s] candidate ready, |Delta| = {cand.delta_count}")

    for seed in range(args.seeds):
        out = search_omega0(
            res.ifs, cand, budget=args.budget, seed=seed, mode="per_symbol",
            c1=cfg.c1, epsilon=cfg.epsilon, run_check=False,
        )
        print(
            f"[{time.time()-t0:6.1f}s] seed {seed}: coverage plateau = {out.coverage:.6f} "
            f"({out.attempts} attempts, omega0 = {'yes' if out.omega0 else 'no'})"
        )


if __name__ == "__main__":
    main()
