"""Full pipeline on one system: scan -> slices -> candidate -> search -> certify.

Prints a stage-by-stage summary with timings. The search clause is expected
to fall short of full coverage at desk scale; the point of this script is to
see how close it gets and what the certificates say regardless.

Usage: python3 scripts/run_e2e.py [--ifs sierpinski] [--budget 2000] [--seed 0]
       [--mode iid|per_symbol]
"""

import argparse
import time

import numpy as np

from ifsproj import (
    RunConfig,
    attractor_points,
    build_candidate,
    build_E,
    build_perturbed_ifs,
    certify_projection_interval,
    check_recurrence,
    closeness_report,
    search_omega0,
    SliceBuilder,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ifs", default="sierpinski")
    ap.add_argument("--budget", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mode", default="iid", choices=("iid", "per_symbol"))
    args = ap.parse_args()

    cfg = RunConfig(ifs=args.ifs, seed=args.seed, search_budget=args.budget, search_mode=args.mode)
    t0 = time.time()
    res = cfg.resolve()
    geom = cfg.geometry()
    print(f"{args.ifs}: d = {res.dimension:.6f}, rho = {cfg.rho}, n_theta = {geom.n_theta}")

    E = build_E(res.ifs, cfg.n_theta, cfg.rho, res.delta, epsilon=cfg.epsilon)
    print(
        f"[{time.time()-t0:6.1f}s] E: {int(E.member.sum())}/{geom.n_theta} rows, "
        f"c5 = {E.c5:.6f}, excluded = {E.excluded_fraction:.4f}"
    )

    slices = SliceBuilder(res.ifs, E, geom, res.slice_params).all_rows()
    cand = build_candidate(res.ifs, E, slices, cfg.rho, geom=geom)
    print(
        f"[{time.time()-t0:6.1f}s] candidate: |L0| = {int(cand.L0.sum())}, "
        f"|L| = {int(cand.L.sum())}, |L1| = {int(cand.L1.sum())}"
    )

    base_rep = check_recurrence(res.ifs, cand)
    print(f"[{time.time()-t0:6.1f}s] unperturbed recurrence: {base_rep.fraction:.6f}")

    out = search_omega0(
        res.ifs, cand, budget=cfg.search_budget, seed=cfg.seed, mode=cfg.search_mode,
        c1=cfg.c1, epsilon=cfg.epsilon,
    )
    print(
        f"[{time.time()-t0:6.1f}s] search({out.mode}): attempts = {out.attempts}, "
        f"coverage = {out.coverage:.6f}, omega0 = {'yes' if out.omega0 else 'no'}"
    )

    best = out.omega0 or out.best_assignment
    if best is None:
        return
    pert = build_perturbed_ifs(res.ifs, best, cfg.c1, cfg.rho)
    close = closeness_report(res.ifs, pert, cfg.epsilon, cfg.c1, cfg.rho, cfg.c0)
    print(f"[{time.time()-t0:6.1f}s] epsilon_distance = {close['epsilon_distance']:.6f} "
          f"(< {cfg.epsilon}: {close['epsilon_ok']})")
    rep = check_recurrence(pert, cand)
    print(f"[{time.time()-t0:6.1f}s] perturbed recurrence: {rep.fraction:.6f}")

    rng = np.random.default_rng([cfg.seed, 17])
    rows = np.flatnonzero(E.member & cand.L.any(axis=1))
    pick = np.sort(rng.choice(rows, size=min(cfg.n_theta_sample, len(rows)), replace=False))
    pts = attractor_points(pert, cfg.cert_resolution / 2.0, budget=cfg.word_budget)
    membership = cand.membership("L")
    ok = 0
    for row in pick:
        cert = certify_projection_interval(
            pert, row * geom.pitch, cfg.cert_resolution,
            candidate=cand, membership=membership, points=pts,
        )
        ok += cert.certified
        print(f"    theta = {row * geom.pitch:.4f}: "
              f"interval = {cert.interval}, recurrence run = {cert.recurrence_length:.4f}")
    print(f"[{time.time()-t0:6.1f}s] certified {ok}/{len(pick)} sampled angles")


if __name__ == "__main__":
    main()
