"""Perturbations of an IFS and the randomized search for a covering one.

A perturbation rotates one map's image square about its center and shifts it
by gamma * c1 * rho; ratios never change. An assignment gives one
perturbation per first-block symbol. The search draws assignments from a
deterministic stream and accepts the first whose two-letter renormalizations
send every probe-net point back into the candidate core (within grid pitch).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .ifs import IfsSpec, Similarity, compose, epsilon_distance, make_ifs
from .lines import Line, renormalize_arrays
from .recurrence import (
    GridMembership,
    RecurrenceReport,
    RecurrentCandidate,
    check_recurrence,
    two_letter_words,
)


@dataclass(frozen=True)
class Perturbation:
    phi: float
    gamma: tuple[float, float]

    def __post_init__(self):
        gx, gy = self.gamma
        if not (abs(gx) < 1.0 and abs(gy) < 1.0):
            raise ValueError(f"gamma components must lie in (-1,1), got {self.gamma}")

    @classmethod
    def identity(cls) -> "Perturbation":
        return cls(0.0, (0.0, 0.0))


@dataclass(frozen=True)
class OmegaAssignment:
    """One perturbation per first-block symbol; second-block maps stay fixed."""

    omegas: dict[str, Perturbation]

    def to_json_dict(self) -> dict:
        return {
            a: {"phi": w.phi, "gamma": list(w.gamma)}
            for a, w in sorted(self.omegas.items())
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "OmegaAssignment":
        return cls(
            {a: Perturbation(v["phi"], (v["gamma"][0], v["gamma"][1])) for a, v in d.items()}
        )

    @classmethod
    def identity(cls, ifs: IfsSpec) -> "OmegaAssignment":
        return cls({a: Perturbation.identity() for a in ifs.part_one})


def perturb_map(f: Similarity, omega: Perturbation, c1: float, rho: float) -> Similarity:
    """Rotate f's image square by phi about its center, shift by gamma*c1*rho."""
    c = np.asarray(f((0.5, 0.5)))
    tau = np.asarray(f.translation)
    cp, sp = math.cos(omega.phi), math.sin(omega.phi)
    rot = np.array([[cp, -sp], [sp, cp]])
    tau_p = rot @ (tau - c) + c + np.asarray(omega.gamma) * (c1 * rho)
    return Similarity(f.ratio, f.angle + omega.phi, f.reflect, (tau_p[0], tau_p[1]))


def build_perturbed_ifs(
    ifs: IfsSpec, assignment: OmegaAssignment, c1: float, rho: float
) -> IfsSpec:
    """Apply the assignment on part_one, keep part_two; containment of the
    perturbed squares in I may fail and is only warned about."""
    if set(assignment.omegas) != set(ifs.part_one):
        raise ValueError(
            f"assignment domain {sorted(assignment.omegas)} != part_one {sorted(ifs.part_one)}"
        )
    maps = {}
    for a in ifs.alphabet:
        f = ifs.maps[a]
        maps[a] = perturb_map(f, assignment.omegas[a], c1, rho) if a in assignment.omegas else f
    return make_ifs(maps, part_one=ifs.part_one, alphabet=ifs.alphabet, check_containment=False)


def closeness_report(
    base: IfsSpec, perturbed: IfsSpec, epsilon: float, c1: float, rho: float, c0: float
) -> dict:
    """Measured epsilon-distance plus the documented sufficient bound
    rho <= epsilon / (2 c1 c0); both reported, neither fatal."""
    dist = epsilon_distance(base, perturbed)
    return {
        "epsilon_distance": dist,
        "epsilon": epsilon,
        "epsilon_ok": dist < epsilon,
        "sufficient_bound": epsilon / (2.0 * c1 * c0),
        "sufficient_bound_ok": rho <= epsilon / (2.0 * c1 * c0),
    }


def draw_assignment(rng: np.random.Generator, ifs: IfsSpec, epsilon: float) -> OmegaAssignment:
    """Uniform product draw, one (phi, gamma) block per part_one symbol in
    alphabet order."""
    omegas = {}
    for a in ifs.part_one:
        phi = rng.uniform(-epsilon, epsilon)
        gx, gy = rng.uniform(-1.0, 1.0, size=2)
        omegas[a] = Perturbation(float(phi), (float(gx), float(gy)))
    return OmegaAssignment(omegas)


class CoverageTester:
    """Membership of assignments in the intersection of the per-point witness
    sets over the probe net Delta.

    A point u is covered under an assignment when some two-letter word of the
    perturbed system renormalizes u to within `slack` (default: grid pitch)
    of an L0 cell. Probe points (an evenly strided subset of Delta) give an
    exact early rejection: an assignment that misses a probe point cannot
    cover Delta.
    """

    def __init__(
        self,
        ifs: IfsSpec,
        cand: RecurrentCandidate,
        c1: float,
        epsilon: float,
        slack: float | None = None,
        probe_size: int = 2048,
    ):
        self.ifs = ifs
        self.cand = cand
        self.c1 = c1
        self.epsilon = epsilon
        self.slack = cand.geom.pitch if slack is None else slack
        self.thetas, self.ts = cand.delta_points()
        self.member0 = GridMembership(cand.geom, cand.L0)
        n = len(self.thetas)
        stride = max(1, n // probe_size)
        self.probe_idx = np.arange(0, n, stride)

    @property
    def n_points(self) -> int:
        return len(self.thetas)

    def _words(self, assignment: OmegaAssignment):
        maps = {
            a: (
                perturb_map(self.ifs.maps[a], assignment.omegas[a], self.c1, self.cand.rho)
                if a in assignment.omegas
                else self.ifs.maps[a]
            )
            for a in self.ifs.alphabet
        }
        return [compose(maps[b1], maps[b2]) for b1, b2 in product(self.ifs.alphabet, repeat=2)]

    def coverage(
        self, assignment: OmegaAssignment, indices: np.ndarray | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """covered flags and witness word indices (-1 where uncovered) for the
        given subset of Delta (default: all of it)."""
        idx = np.arange(self.n_points) if indices is None else indices
        covered = np.zeros(len(idx), dtype=bool)
        witness = np.full(len(idx), -1, dtype=np.int16)
        rem = np.arange(len(idx))
        for w_i, g in enumerate(self._words(assignment)):
            if not len(rem):
                break
            th_hat, t_hat = renormalize_arrays(g, self.thetas[idx[rem]], self.ts[idx[rem]])
            hit = self.member0.contains(th_hat, t_hat, self.slack)
            covered[rem[hit]] = True
            witness[rem[hit]] = w_i
            rem = rem[~hit]
        return covered, witness

    def covers_probe(self, assignment: OmegaAssignment) -> bool:
        covered, _ = self.coverage(assignment, self.probe_idx)
        return bool(covered.all())

    def uncovered_count(self, assignment: OmegaAssignment) -> int:
        covered, _ = self.coverage(assignment)
        return int(np.count_nonzero(~covered))


@dataclass
class SearchOutcome:
    omega0: OmegaAssignment | None
    attempts: int
    accepted_attempt: int | None
    best_assignment: OmegaAssignment | None
    success_table: np.ndarray | None
    witness_words: np.ndarray | None
    coverage: float
    estimated_failure_prob: float
    mode: str
    check_report: RecurrenceReport | None = None

    def to_json_dict(self) -> dict:
        return {
            "omega0": self.omega0.to_json_dict() if self.omega0 else None,
            "attempts": self.attempts,
            "accepted_attempt": self.accepted_attempt,
            "best_assignment": (
                self.best_assignment.to_json_dict() if self.best_assignment else None
            ),
            "coverage": self.coverage,
            "estimated_failure_prob": self.estimated_failure_prob,
            "mode": self.mode,
            "check_report": self.check_report.to_json_dict() if self.check_report else None,
        }


def estimate_success_prob(
    ifs: IfsSpec,
    u: Line,
    cand: RecurrentCandidate,
    samples: int,
    seed: int,
    c1: float = 8.0,
    epsilon: float = 0.3,
    slack: float | None = None,
) -> float:
    """Monte Carlo measure of the assignments that send u back into L0.

    u must lie on the probe net (within grid pitch of an L1 cell).
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    geom = cand.geom
    if not GridMembership(geom, cand.L1).contains([u.theta], [u.t], geom.pitch)[0]:
        raise ValueError(f"line (theta={u.theta}, t={u.t}) is not on the probe net")
    slack = geom.pitch if slack is None else slack
    member0 = GridMembership(geom, cand.L0)
    rng = np.random.default_rng(seed)
    th = np.array([u.theta])
    tt = np.array([u.t])
    hits = 0
    for _ in range(samples):
        assignment = draw_assignment(rng, ifs, epsilon)
        maps = {
            a: (
                perturb_map(ifs.maps[a], assignment.omegas[a], c1, cand.rho)
                if a in assignment.omegas
                else ifs.maps[a]
            )
            for a in ifs.alphabet
        }
        pert = make_ifs(maps, part_one=ifs.part_one, alphabet=ifs.alphabet, check_containment=False)
        for _, g in two_letter_words(pert):
            th_hat, t_hat = renormalize_arrays(g, th, tt)
            if member0.contains(th_hat, t_hat, slack)[0]:
                hits += 1
                break
    return hits / samples


def search_omega0(
    ifs: IfsSpec,
    cand: RecurrentCandidate,
    budget: int,
    seed: int,
    mode: str = "iid",
    c1: float = 8.0,
    epsilon: float = 0.3,
    slack: float | None = None,
    probe_size: int = 2048,
    stall_limit: int = 40,
    run_check: bool = True,
) -> SearchOutcome:
    """Randomized search for an assignment covering the whole probe net.

    mode "iid": fresh assignment per attempt from per-index streams (so a
    parallel evaluator would accept the same, lowest-index, sample). An
    attempt is rejected exactly when it misses a probe point (probe misses
    are sound rejections); full-net evaluation only runs on probe-clean
    attempts, and acceptance requires full coverage.

    mode "per_symbol": sequential hill climb resampling one symbol's
    perturbation at a time, keeping changes that strictly shrink the
    uncovered set; restarts from a fresh draw after stall_limit consecutive
    rejections. Matches the per-symbol product structure of the underlying
    probability bound; much stronger at coarse rho.

    On budget exhaustion omega0 is absent and the best assignment seen (by
    probe coverage in iid mode, by uncovered count in per_symbol mode) is
    reported with its full-net coverage.
    """
    if cand.delta_count == 0:
        raise ValueError("probe net is empty")
    tester = CoverageTester(ifs, cand, c1, epsilon, slack=slack, probe_size=probe_size)
    n = tester.n_points

    def finish(omega0, attempts, accepted, best, covered, witness):
        coverage = float(np.count_nonzero(covered) / n) if covered is not None else 0.0
        report = None
        if omega0 is not None and run_check:
            report = check_recurrence(build_perturbed_ifs(ifs, omega0, c1, cand.rho), cand)
        return SearchOutcome(
            omega0=omega0,
            attempts=attempts,
            accepted_attempt=accepted,
            best_assignment=best,
            success_table=covered,
            witness_words=witness,
            coverage=coverage,
            estimated_failure_prob=1.0 - coverage,
            mode=mode,
            check_report=report,
        )

    if mode == "iid":
        best_frac, best_assignment = -1.0, None
        for k in range(budget):
            rng = np.random.default_rng([seed, k])
            assignment = draw_assignment(rng, ifs, epsilon)
            probe_cov, _ = tester.coverage(assignment, tester.probe_idx)
            frac = float(np.count_nonzero(probe_cov) / len(probe_cov))
            if frac > best_frac:
                best_frac, best_assignment = frac, assignment
            if not probe_cov.all():
                continue
            covered, witness = tester.coverage(assignment)
            if covered.all():
                return finish(assignment, k + 1, k, assignment, covered, witness)
        if best_assignment is None:
            return finish(None, budget, None, None, None, None)
        covered, witness = tester.coverage(best_assignment)
        return finish(None, budget, None, best_assignment, covered, witness)

    if mode == "per_symbol":
        rng = np.random.default_rng([seed])
        symbols = list(ifs.part_one)
        attempts = 0

        current = draw_assignment(rng, ifs, epsilon)
        attempts += 1
        covered, witness = tester.coverage(current)
        uncovered = int(np.count_nonzero(~covered))
        best_unc, best_assignment, best_covered, best_witness = (
            uncovered,
            current,
            covered,
            witness,
        )
        stall = 0
        while attempts < budget and best_unc > 0:
            sym = symbols[attempts % len(symbols)]
            candidate = OmegaAssignment(
                {**current.omegas, sym: draw_assignment(rng, ifs, epsilon).omegas[sym]}
            )
            attempts += 1
            unc_idx = np.flatnonzero(~covered)
            stride = max(1, len(unc_idx) // probe_size)
            probe_unc = unc_idx[::stride]
            probe_cov, _ = tester.coverage(candidate, probe_unc)
            if not probe_cov.any():
                stall += 1
            else:
                cand_covered, cand_witness = tester.coverage(candidate)
                cand_unc = int(np.count_nonzero(~cand_covered))
                if cand_unc < uncovered:
                    current, covered, witness, uncovered = (
                        candidate,
                        cand_covered,
                        cand_witness,
                        cand_unc,
                    )
                    stall = 0
                    if uncovered < best_unc:
                        best_unc, best_assignment = uncovered, current
                        best_covered, best_witness = covered, witness
                else:
                    stall += 1
            if stall >= stall_limit and attempts < budget:
                current = draw_assignment(rng, ifs, epsilon)
                attempts += 1
                covered, witness = tester.coverage(current)
                uncovered = int(np.count_nonzero(~covered))
                if uncovered < best_unc:
                    best_unc, best_assignment = uncovered, current
                    best_covered, best_witness = covered, witness
                stall = 0
        if best_unc == 0:
            return finish(
                best_assignment, attempts, attempts - 1, best_assignment, best_covered, best_witness
            )
        return finish(None, attempts, None, best_assignment, best_covered, best_witness)

    raise ValueError(f"unknown search mode {mode!r}")
