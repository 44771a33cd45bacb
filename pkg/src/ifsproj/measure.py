"""Projected densities of the uniform self-similar measure and word statistics.

The stationary measure assigns mass ratio(w)^d to the cylinder f_w(I); its
projection onto direction theta is estimated by a histogram of cylinder-center
deposits at the stopping-word scale. The direction set E keeps the angles
whose estimated L2 density norm stays below a threshold c5.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .ifs import IfsSpec, Word, cylinder_square, stopping_words, word_ratio
from .lines import project_point, project_square


def stopping_cylinders(
    ifs: IfsSpec,
    rho: float,
    budget: int | None = None,
    point: tuple[float, float] = (0.5, 0.5),
) -> tuple[list[Word], np.ndarray, np.ndarray, np.ndarray]:
    """Stopping words at scale rho with the points f_w(point), ratios, masses.

    Same word set as ifs.stopping_words, but walks the prefix tree carrying
    the affine data numerically so large covers stay cheap. Output is sorted
    in lexicographic (alphabet-rank) order. The default point is the square
    center; passing an attractor point makes every f_w(point) an attractor
    point too.
    """
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho must lie in (0,1), got {rho}")
    d = ifs.dimension
    letters = []
    for a in ifs.alphabet:
        f = ifs.maps[a]
        letters.append((a, f.ratio, f.angle, f.reflect, f.translation[0], f.translation[1]))

    words: list[Word] = []
    rows = []
    # node: (word, r, angle, reflect, tx, ty) for the composed map so far
    stack = [((), 1.0, 0.0, False, 0.0, 0.0)]
    while stack:
        w, r, ang, refl, tx, ty = stack.pop()
        cos_a, sin_a = math.cos(ang), math.sin(ang)
        sgn = -1.0 if refl else 1.0
        for a, rl, al, ml, lx, ly in letters:
            # compose (r, ang, refl, t) with the letter map
            px, py = lx, sgn * ly
            ntx = r * (cos_a * px - sin_a * py) + tx
            nty = r * (sin_a * px + cos_a * py) + ty
            nr = r * rl
            nang = ang + sgn * al
            nrefl = refl ^ ml
            nw = w + (a,)
            if nr <= rho:
                words.append(nw)
                rows.append((nr, nang, nrefl, ntx, nty))
                if budget is not None and len(words) > budget:
                    raise BudgetExceeded(
                        f"budget exceeded: {len(words)} stopping words > {budget}",
                        partial=len(words),
                    )
            else:
                stack.append((nw, nr, nang, nrefl, ntx, nty))

    rank = {a: i for i, a in enumerate(ifs.alphabet)}
    order = sorted(range(len(words)), key=lambda i: tuple(rank[a] for a in words[i]))
    words = [words[i] for i in order]
    arr = np.array([rows[i] for i in order], dtype=float)
    ratios = arr[:, 0]
    px, py = point
    cos_v, sin_v = np.cos(arr[:, 1]), np.sin(arr[:, 1])
    sy = np.where(arr[:, 2] > 0.5, -py, py)
    cx = arr[:, 0] * (cos_v * px - sin_v * sy) + arr[:, 3]
    cy = arr[:, 0] * (sin_v * px + cos_v * sy) + arr[:, 4]
    centers = np.column_stack([cx, cy])
    masses = ratios**d
    return words, centers, ratios, masses


@dataclass(frozen=True)
class ProjectedHistogram:
    """Piecewise-constant estimate of the projected density at angle theta.

    Bins have width bin_width and are aligned to multiples of it; origin is
    the left edge of masses[0].
    """

    theta: float
    bin_width: float
    origin: float
    masses: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(math.fsum(self.masses.tolist()))


def projected_histogram(
    ifs: IfsSpec,
    theta: float,
    rho: float,
    delta: float,
    words_data=None,
    budget: int | None = None,
) -> ProjectedHistogram:
    """Deposit cylinder masses at projected centers into width-delta bins.

    Center deposits are off by at most the cylinder diameter (~rho), which is
    why delta should stay at the rho^(1/2) scale.
    """
    if not (delta > 0.0):
        raise ValueError(f"delta must be positive, got {delta}")
    if words_data is None:
        words_data = stopping_cylinders(ifs, rho, budget=budget)
    _, centers, _, masses = words_data
    pos = centers @ np.array([-math.sin(theta), math.cos(theta)])
    idx = np.floor(pos / delta).astype(np.int64)
    lo = int(idx.min())
    binned = np.bincount(idx - lo, weights=masses, minlength=int(idx.max()) - lo + 1)
    return ProjectedHistogram(theta=theta, bin_width=delta, origin=lo * delta, masses=binned)


def l2_norm_estimate(h: ProjectedHistogram) -> float:
    """Squared L2 norm of the histogram's density: sum of mass^2 / bin width."""
    return float(np.dot(h.masses, h.masses) / h.bin_width)


@dataclass(frozen=True)
class DirectionSet:
    """Membership of the uniform theta-grid in E = {theta : l2 < c5}."""

    theta_grid: np.ndarray
    l2: np.ndarray
    c5: float
    member: np.ndarray
    excluded_fraction: float

    @property
    def pitch(self) -> float:
        return math.pi / len(self.theta_grid)

    def member_of(self, theta: float) -> bool:
        """Cell membership for an arbitrary canonical angle (nearest row)."""
        i = int(round(theta / self.pitch)) % len(self.theta_grid)
        return bool(self.member[i])

    def member_rows(self) -> np.ndarray:
        return np.flatnonzero(self.member)


def _l2_for_rows(args):
    centers, masses, delta, thetas = args
    out = np.empty(len(thetas))
    for j, theta in enumerate(thetas):
        pos = centers @ np.array([-math.sin(theta), math.cos(theta)])
        idx = np.floor(pos / delta).astype(np.int64)
        lo = idx.min()
        binned = np.bincount(idx - lo, weights=masses)
        out[j] = np.dot(binned, binned) / delta
    return out


def select_c5(l2_values: np.ndarray, epsilon: float) -> float:
    """Smallest observed-quantile threshold excluding less than epsilon/2.

    Membership is strict (l2 < c5), so candidate thresholds are the observed
    values themselves plus one value just above the maximum (excludes none).
    """
    vals = np.unique(l2_values)
    candidates = np.append(vals, np.nextafter(vals[-1], np.inf))
    n = len(l2_values)
    for c in candidates:
        if np.count_nonzero(l2_values >= c) / n < epsilon / 2.0:
            return float(c)
    raise AssertionError("unreachable: the last candidate excludes nothing")


def build_E(
    ifs: IfsSpec,
    grid_size: int,
    rho: float,
    delta: float,
    c5: float | None = None,
    epsilon: float = 0.3,
    words_data=None,
    budget: int | None = None,
    workers: int = 1,
) -> DirectionSet:
    """Evaluate the L2 estimate on theta_j = j*pi/grid_size and threshold it.

    With c5 absent, the threshold is auto-selected as the smallest grid
    quantile whose excluded fraction stays below epsilon/2. Rows are
    independent, so the evaluation parallelizes without affecting results.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be at least 2, got {grid_size}")
    if words_data is None:
        words_data = stopping_cylinders(ifs, rho, budget=budget)
    _, centers, _, masses = words_data
    thetas = np.arange(grid_size) * (math.pi / grid_size)
    if workers <= 1:
        l2 = _l2_for_rows((centers, masses, delta, thetas))
    else:
        chunks = np.array_split(thetas, workers * 4)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_l2_for_rows, [(centers, masses, delta, c) for c in chunks]))
        l2 = np.concatenate(parts)
    if c5 is None:
        c5 = select_c5(l2, epsilon)
    member = l2 < c5
    return DirectionSet(
        theta_grid=thetas,
        l2=l2,
        c5=float(c5),
        member=member,
        excluded_fraction=float(np.count_nonzero(~member) / grid_size),
    )


@dataclass(frozen=True)
class WordClassification:
    """Good/bad split of a word family by projected-center crowding."""

    theta: float
    words: tuple[Word, ...]
    centers: np.ndarray
    good: np.ndarray
    radius: float
    count_cap: float

    @property
    def n_bad(self) -> int:
        return int(np.count_nonzero(~self.good))


def _assert_prefix_free(words: Sequence[Word]):
    if not words:
        raise ValueError("word list is empty")
    for u, v in zip(sorted(words), sorted(words)[1:]):
        if v[: len(u)] == u:
            raise ValueError(f"word list is not prefix-free: {u} prefixes {v}")


def classify_good_words(
    ifs: IfsSpec,
    theta: float,
    words: Sequence[Word],
    rho: float,
    c6: float,
    c9: float,
    method: str = "brute",
) -> WordClassification:
    """A word is good when at most c6^-1 rho^-(d-1)/2 centers crowd within
    c9^-1 rho^(1/2) of its projected center (strictly, counting itself)."""
    _assert_prefix_free(words)
    centers = np.array(
        [project_point(theta, cylinder_square(ifs, w).corners().mean(axis=0)) for w in words]
    )
    radius = math.sqrt(rho) / c9
    cap = (1.0 / c6) * rho ** (-0.5 * (ifs.dimension - 1.0))
    if method == "brute":
        counts = np.count_nonzero(np.abs(centers[:, None] - centers[None, :]) < radius, axis=1)
    elif method == "sweep":
        xs = np.sort(centers)
        counts = np.searchsorted(xs, centers + radius, side="left") - np.searchsorted(
            xs, centers - radius, side="right"
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return WordClassification(
        theta=theta,
        words=tuple(words),
        centers=centers,
        good=counts <= cap,
        radius=radius,
        count_cap=cap,
    )


def bad_word_cap(c5: float, c6: float, c9: float, rho: float, d: float) -> float:
    """Configured-constant ceiling for the number of bad words at any good
    direction: 6 c5 c6 c9^3 rho^(-d/2)."""
    return 6.0 * c5 * c6 * c9**3 * rho ** (-0.5 * d)


def union_projection_length(ifs: IfsSpec, words: Sequence[Word], theta: float) -> float:
    """Exact total length of the union of projected cylinder intervals."""
    if not words:
        return 0.0
    ivs = sorted(
        (project_square(theta, cylinder_square(ifs, w)) for w in words),
        key=lambda iv: iv.lo,
    )
    total = 0.0
    cur_lo, cur_hi = ivs[0].lo, ivs[0].hi
    for iv in ivs[1:]:
        if iv.lo > cur_hi:
            total += cur_hi - cur_lo
            cur_lo, cur_hi = iv.lo, iv.hi
        else:
            cur_hi = max(cur_hi, iv.hi)
    return total + (cur_hi - cur_lo)


def measured_c9(ifs: IfsSpec, rho: float) -> float:
    """Smallest constant making the cylinder-measure and projected-length
    sandwiches hold for every stopping word at scale rho^(1/2).

    Projected lengths of a square of side r lie in [r, sqrt(2) r] over all
    angles, so the angle sup is exact without scanning theta.
    """
    d = ifs.dimension
    half = math.sqrt(rho)
    c9 = 1.0
    for w in stopping_words(ifs, half):
        r = word_ratio(ifs, w)
        mu = r**d
        c9 = max(c9, mu / rho ** (0.5 * d), rho ** (0.5 * d) / mu)
        c9 = max(c9, math.sqrt(2.0) * r / half, half / r)
    return c9
