"""Command line front end.

Subcommands: dimension | scan | build-l | search | verify | certify | render.
Exit codes: 0 = ran to completion (negative findings included), 2 = config
error, 3 = budget exceeded. Randomized commands echo their seed, and a rerun
with the same seed writes byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import RunConfig, load_config, override
from .errors import BudgetExceeded, ConfigError
from .ifs import IfsSpec, check_osc_unit_square
from .measure import DirectionSet, build_E, stopping_cylinders
from .recurrence import (
    RecurrentCandidate,
    SliceBuilder,
    attractor_points,
    build_candidate,
    certify_projection_interval,
    check_recurrence,
)
from .search import (
    OmegaAssignment,
    build_perturbed_ifs,
    closeness_report,
    search_omega0,
)

_DIM_GUARD = "d ≤ 1, theorem hypotheses unmet"


def _np_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _write_json(path: str, obj) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(obj, sort_keys=True, indent=2, default=_np_default))
        fh.write("\n")
    return path


def _outdir(cfg: RunConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _guard_dimension(ifs: IfsSpec) -> None:
    if ifs.dimension <= 1.0 + 1e-9:
        raise ConfigError(_DIM_GUARD)


def _build_pipeline(cfg: RunConfig):
    """build_E -> slices -> candidate, shared by the pipeline commands."""
    res = cfg.resolve()
    _guard_dimension(res.ifs)
    geom = cfg.geometry()
    E = build_E(
        res.ifs,
        cfg.n_theta,
        cfg.rho,
        res.delta,
        c5=cfg.c5,
        epsilon=cfg.epsilon,
        budget=cfg.word_budget,
        workers=cfg.workers,
    )
    slices = SliceBuilder(res.ifs, E, geom, res.slice_params).all_rows()
    cand = build_candidate(res.ifs, E, slices, cfg.rho, geom=geom)
    return res, geom, E, cand


def _sample_e_rows(E: DirectionSet, cand: RecurrentCandidate, n: int, seed: int) -> np.ndarray:
    """Deterministic sample of E-grid angles with a nonempty slice."""
    rows = np.flatnonzero(E.member & cand.L.any(axis=1))
    if not len(rows):
        return np.array([])
    rng = np.random.default_rng([seed, 17])
    pick = rng.choice(rows, size=min(n, len(rows)), replace=False)
    return np.sort(pick) * cand.geom.pitch


def _certified_intervals(ifs_eval, thetas, cfg, cand) -> list[dict]:
    membership = cand.membership("L")
    pts = attractor_points(ifs_eval, cfg.cert_resolution / 2.0, budget=cfg.word_budget)
    out = []
    for theta in thetas:
        cert = certify_projection_interval(
            ifs_eval,
            float(theta),
            cfg.cert_resolution,
            budget=cfg.word_budget,
            candidate=cand,
            membership=membership,
            points=pts,
        )
        out.append(cert.to_json_dict())
    return out


def cmd_dimension(cfg: RunConfig, args) -> int:
    ifs = cfg.load_ifs_spec()
    print(f"d = {ifs.dimension:.12f}")
    osc = check_osc_unit_square(ifs)
    if osc.ok:
        print("OSC: satisfied (open unit square images are pairwise disjoint)")
    else:
        problems = []
        if osc.not_contained:
            problems.append(f"images outside the square: {', '.join(osc.not_contained)}")
        if osc.overlapping_pairs:
            pairs = ", ".join(f"{a}/{b}" for a, b in osc.overlapping_pairs)
            problems.append(f"overlapping pairs: {pairs}")
        print(f"OSC: not verified by the open-unit-square test; {'; '.join(problems)}")
    return 0


def _render_pgm(ifs: IfsSpec, rho: float, size: int, path: str, budget: int | None) -> int:
    """White stopping-word centers on black, y axis pointing up."""
    _, centers, _, _ = stopping_cylinders(ifs, rho, budget=budget)
    img = np.zeros((size, size), dtype=np.uint8)
    cols = np.clip(np.rint(centers[:, 0] * (size - 1)).astype(int), 0, size - 1)
    rows = (size - 1) - np.clip(np.rint(centers[:, 1] * (size - 1)).astype(int), 0, size - 1)
    img[rows, cols] = 255
    with open(path, "wb") as fh:
        fh.write(f"P5 {size} {size} 255\n".encode("ascii"))
        fh.write(img.tobytes())
    return len(centers)


def cmd_scan(cfg: RunConfig, args) -> int:
    ifs = cfg.load_ifs_spec()
    out = _outdir(cfg)
    grid = cfg.grid_size if cfg.grid_size is not None else cfg.n_theta
    E = build_E(
        ifs,
        grid,
        cfg.rho,
        cfg.delta_value(),
        c5=cfg.c5,
        epsilon=cfg.epsilon,
        budget=cfg.word_budget,
        workers=cfg.workers,
    )
    csv_path = os.path.join(out, "scan.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("theta,l2_estimate,in_E\n")
        for j in range(grid):
            m = "true" if E.member[j] else "false"
            fh.write(f"{float(E.theta_grid[j])!r},{float(E.l2[j])!r},{m}\n")
        fh.write(f"# excluded_fraction,{float(E.excluded_fraction)!r}\n")
    print(f"scan: {grid} rows -> {csv_path}")
    print(f"c5 = {E.c5!r}, excluded_fraction = {E.excluded_fraction!r}")
    if getattr(args, "render", False):
        pgm_path = os.path.join(out, "attractor.pgm")
        n = _render_pgm(ifs, cfg.rho, cfg.raster_size, pgm_path, cfg.word_budget)
        print(f"raster: {n} centers -> {pgm_path}")
    return 0


def cmd_build_l(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    res, geom, E, cand = _build_pipeline(cfg)
    npz_path = os.path.join(out, "candidate.npz")
    cand.save(npz_path)
    rows = np.flatnonzero(E.member)
    slice_measures = cand.L0[rows].sum(axis=1) * geom.pitch
    summary = {
        "rho": cfg.rho,
        "n_theta": geom.n_theta,
        "pitch": geom.pitch,
        "t_max": cfg.t_max,
        "c5": E.c5,
        "excluded_fraction": E.excluded_fraction,
        "e_rows": int(E.member.sum()),
        "counts": {
            "L0": int(cand.L0.sum()),
            "L": int(cand.L.sum()),
            "L1": int(cand.L1.sum()),
        },
        "min_slice_measure": float(slice_measures.min()) if len(rows) else 0.0,
        "empty_e_slices": int((slice_measures == 0).sum()) if len(rows) else 0,
        "candidate_file": npz_path,
    }
    _write_json(os.path.join(out, "candidate.json"), summary)
    print(
        f"L0={summary['counts']['L0']} L={summary['counts']['L']} "
        f"L1={summary['counts']['L1']} -> {npz_path}"
    )
    print(f"min |L0(theta)| over E = {summary['min_slice_measure']!r}")
    return 0


def cmd_search(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    print(f"seed = {cfg.seed}")
    res, geom, E, cand = _build_pipeline(cfg)
    outcome = search_omega0(
        res.ifs,
        cand,
        budget=cfg.search_budget,
        seed=cfg.seed,
        mode=cfg.search_mode,
        c1=cfg.c1,
        epsilon=cfg.epsilon,
    )
    report = {
        "seed": cfg.seed,
        "mode": outcome.mode,
        "budget": cfg.search_budget,
        "attempts": outcome.attempts,
        "accepted_attempt": outcome.accepted_attempt,
        "coverage": outcome.coverage,
        "estimated_failure_prob": outcome.estimated_failure_prob,
        "excluded_fraction": E.excluded_fraction,
        "omega0": outcome.omega0.to_json_dict() if outcome.omega0 else None,
        "best_assignment": (
            outcome.best_assignment.to_json_dict() if outcome.best_assignment else None
        ),
        "check": outcome.check_report.to_json_dict() if outcome.check_report else None,
    }
    if outcome.omega0 is not None:
        perturbed = build_perturbed_ifs(res.ifs, outcome.omega0, cfg.c1, cfg.rho)
        report["closeness"] = closeness_report(
            res.ifs, perturbed, cfg.epsilon, cfg.c1, cfg.rho, cfg.c0
        )
        thetas = _sample_e_rows(E, cand, cfg.n_theta_sample, cfg.seed)
        report["certified_intervals"] = _certified_intervals(perturbed, thetas, cfg, cand)
        report["status"] = "omega0 found"
        omega_path = _write_json(os.path.join(out, "omega0.json"), outcome.omega0.to_json_dict())
        print(f"omega0 found at attempt {outcome.accepted_attempt} -> {omega_path}")
    else:
        report["closeness"] = None
        report["certified_intervals"] = None
        report["status"] = "no omega0 found"
        print(f"no omega0 found (best coverage {outcome.coverage!r} after {outcome.attempts} attempts)")
    path = _write_json(os.path.join(out, "search_report.json"), report)
    print(f"report -> {path}")
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    print(f"seed = {cfg.seed}")
    try:
        with open(args.omega, "r", encoding="utf-8") as fh:
            assignment = OmegaAssignment.from_json_dict(json.load(fh))
    except FileNotFoundError:
        raise ConfigError(f"omega: no such file {args.omega!r}") from None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"omega: malformed perturbation file: {exc}") from None
    res, geom, E, cand = _build_pipeline(cfg)
    try:
        perturbed = build_perturbed_ifs(res.ifs, assignment, cfg.c1, cfg.rho)
    except ValueError as exc:
        raise ConfigError(f"omega: {exc}") from None
    rep = check_recurrence(perturbed, cand)
    thetas = _sample_e_rows(E, cand, cfg.n_theta_sample, cfg.seed)
    report = {
        "seed": cfg.seed,
        "omega_file": args.omega,
        "omega": assignment.to_json_dict(),
        "closeness": closeness_report(res.ifs, perturbed, cfg.epsilon, cfg.c1, cfg.rho, cfg.c0),
        "excluded_fraction": E.excluded_fraction,
        "check": rep.to_json_dict(),
        "certified_intervals": _certified_intervals(perturbed, thetas, cfg, cand),
    }
    path = _write_json(os.path.join(out, "verify_report.json"), report)
    print(f"recurrence: {rep.recurred}/{rep.total} ({rep.fraction:.6f})")
    print(f"report -> {path}")
    return 0


def cmd_certify(cfg: RunConfig, args) -> int:
    out = _outdir(cfg)
    res, geom, E, cand = _build_pipeline(cfg)
    ifs_eval = res.ifs
    omega_used = None
    if getattr(args, "omega", None):
        with open(args.omega, "r", encoding="utf-8") as fh:
            assignment = OmegaAssignment.from_json_dict(json.load(fh))
        ifs_eval = build_perturbed_ifs(res.ifs, assignment, cfg.c1, cfg.rho)
        omega_used = args.omega
    cert = certify_projection_interval(
        ifs_eval,
        args.theta,
        cfg.cert_resolution,
        budget=cfg.word_budget,
        candidate=cand,
        keep_positions=True,
    )
    gaps_path = os.path.join(out, "certify_gaps.csv")
    pos = cert.positions
    gaps = np.diff(pos)
    with open(gaps_path, "w", encoding="utf-8") as fh:
        fh.write("left,right,gap\n")
        for i in np.flatnonzero(gaps > cfg.cert_resolution):
            fh.write(f"{float(pos[i])!r},{float(pos[i + 1])!r},{float(gaps[i])!r}\n")
        if cert.interval:
            fh.write(f"# interval,{cert.interval[0]!r},{cert.interval[1]!r},{cert.length!r}\n")
        else:
            fh.write(f"# no interval,largest_gap,{cert.largest_gap!r}\n")
    report = {"seed": cfg.seed, "omega_file": omega_used, **cert.to_json_dict()}
    path = _write_json(os.path.join(out, "certify_report.json"), report)
    if cert.certified:
        print(f"interval [{cert.interval[0]!r}, {cert.interval[1]!r}] length {cert.length!r}")
    else:
        print(f"no interval at resolution {cfg.cert_resolution!r}; largest gap {cert.largest_gap!r}")
    print(f"report -> {path}; gap scan -> {gaps_path}")
    return 0


def cmd_render(cfg: RunConfig, args) -> int:
    ifs = cfg.load_ifs_spec()
    out = _outdir(cfg)
    size = args.size if getattr(args, "size", None) else cfg.raster_size
    path = os.path.join(out, "attractor.pgm")
    n = _render_pgm(ifs, cfg.rho, size, path, cfg.word_budget)
    print(f"raster: {n} centers -> {path}")
    return 0


_HANDLERS = {
    "dimension": cmd_dimension,
    "scan": cmd_scan,
    "build-l": cmd_build_l,
    "search": cmd_search,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "render": cmd_render,
}


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", default=None, help="JSON run configuration")
    sp.add_argument("--ifs", default=None, help="builtin name or IFS json path (overrides config)")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--rho", type=float, default=None, help="resolution scale")
    sp.add_argument(
        "--budget",
        type=int,
        default=None,
        help="sample budget for search; stopping-word budget elsewhere",
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ifsproj",
        description="Recurrent sets of lines and interval certificates for self-similar attractors",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("dimension", "build-l", "render"):
        _add_common(sub.add_parser(name))
    sp = sub.add_parser("scan")
    _add_common(sp)
    sp.add_argument("--render", action="store_true", help="also write the PGM raster")
    sp = sub.add_parser("search")
    _add_common(sp)
    sp.add_argument("--mode", choices=("iid", "per_symbol"), default=None)
    sp = sub.add_parser("verify")
    _add_common(sp)
    sp.add_argument("--omega", required=True, help="perturbation assignment json")
    sp = sub.add_parser("certify")
    _add_common(sp)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--omega", default=None, help="optional perturbation assignment json")
    sub.choices["render"].add_argument("--size", type=int, default=None)
    return p


def _config_for(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    budget_field = "search_budget" if args.command == "search" else "word_budget"
    cfg = override(
        cfg,
        ifs=args.ifs,
        seed=args.seed,
        out=args.out,
        rho=args.rho,
        **{budget_field: args.budget},
    )
    if args.command == "search" and getattr(args, "mode", None):
        cfg = override(cfg, search_mode=args.mode)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_for(args)
        return _HANDLERS[args.command](cfg, args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
