"""Lines in the plane, their parameter space, and renormalization by IFS maps.

A line is (theta, t) with theta in [0, pi): the set of p with
<p, nu(theta)> = t, where nu(theta) = (-sin theta, cos theta). The pair
(theta + pi, -t) names the same set; the constructor canonicalizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .ifs import IfsSpec, Similarity, Square, apply_similarity, compose_word, invert_map

TWO_PI = 2.0 * math.pi


def canonical_angle(theta_raw: float) -> tuple[float, int]:
    """Reduce an angle mod pi; the fold count parity flips the offset sign."""
    k = math.floor(theta_raw / math.pi)
    theta = theta_raw - k * math.pi
    if theta >= math.pi:  # representation edge when theta_raw is just below k*pi
        theta -= math.pi
        k += 1
    return theta, k


@dataclass(frozen=True)
class Line:
    """An unoriented line, canonicalized to theta in [0, pi)."""

    theta: float
    t: float

    def __post_init__(self):
        theta, k = canonical_angle(float(self.theta))
        t = float(self.t) if k % 2 == 0 else -float(self.t)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "t", t)

    def carrier_point(self) -> np.ndarray:
        return self.t * normal(self.theta)

    def direction(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def intersects(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo <= other.hi + tol and other.lo <= self.hi + tol


def normal(theta: float) -> np.ndarray:
    return np.array([-math.sin(theta), math.cos(theta)])


def project_point(theta: float, p) -> float | np.ndarray:
    """Signed offset of p along nu(theta); accepts a point or (n, 2) array."""
    pts = np.asarray(p, dtype=float)
    out = -pts[..., 0] * math.sin(theta) + pts[..., 1] * math.cos(theta)
    if out.ndim == 0:
        return float(out)
    return out


def project_square(theta: float, sq: Square) -> Interval:
    """The interval swept by the square's projection offsets."""
    vals = project_point(theta, sq.corners())
    return Interval(float(vals.min()), float(vals.max()))


def line_from_two_points(p, q, tol: float = 1e-12) -> Line:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q - p
    n = float(np.hypot(d[0], d[1]))
    if n < tol:
        raise ValueError("points are too close to define a line")
    theta_raw = math.atan2(d[1], d[0])
    return Line(theta_raw, float(project_point(theta_raw % math.pi, p)))


def line_square_intersects(line: Line, sq: Square, tol: float = 0.0) -> bool:
    """Does the line meet the (closed) square, with tol of slack?"""
    return project_square(line.theta, sq).contains(line.t, tol=tol)


def renormalize_params(
    f: Similarity, theta: float, t
) -> tuple[float, float | np.ndarray]:
    """Closed-form image of lines under f^{-1}, for the forward map f.

    theta is a scalar; t may be a scalar or an array of offsets at that
    angle. Returns (theta', t') already canonicalized. This is the hot path:
    one trig evaluation per (map, angle), vector arithmetic over t.
    """
    tau = np.asarray(f.translation)
    shift = -tau[0] * math.sin(theta) + tau[1] * math.cos(theta)
    t_raw = (np.asarray(t, dtype=float) - shift) / f.ratio
    if f.reflect:
        theta_raw = f.angle - theta
        t_raw = -t_raw
    else:
        theta_raw = theta - f.angle
    theta_p, k = canonical_angle(theta_raw)
    if k % 2 != 0:
        t_raw = -t_raw
    if t_raw.ndim == 0:
        return theta_p, float(t_raw)
    return theta_p, t_raw


def renormalize_arrays(
    f: Similarity, thetas: np.ndarray, ts: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized renormalization of many lines by one forward map f.

    Unlike renormalize_params, theta varies per entry. Returns canonical
    (theta', t') arrays of the input shape.
    """
    thetas = np.asarray(thetas, dtype=float)
    shift = -f.translation[0] * np.sin(thetas) + f.translation[1] * np.cos(thetas)
    t_raw = (np.asarray(ts, dtype=float) - shift) / f.ratio
    if f.reflect:
        theta_raw = f.angle - thetas
        t_raw = -t_raw
    else:
        theta_raw = thetas - f.angle
    k = np.floor(theta_raw / math.pi)
    theta_p = theta_raw - k * math.pi
    edge = theta_p >= math.pi
    if edge.any():
        theta_p = np.where(edge, theta_p - math.pi, theta_p)
        k = k + edge
    t_p = np.where(k.astype(np.int64) % 2 == 0, t_raw, -t_raw)
    return theta_p, t_p


def renormalize_map(f: Similarity, line: Line) -> Line:
    """The image of a line under f^{-1}, for a forward similarity f.

    The angle comes from folding theta - angle (or angle - theta when f
    reflects) into [0, pi); the offset is then recomputed by projecting the
    mapped carrier point, which avoids tracking sign flips symbolically.
    """
    theta_raw = f.angle - line.theta if f.reflect else line.theta - f.angle
    theta_p, _ = canonical_angle(theta_raw)
    p = apply_similarity(invert_map(f), line.carrier_point())
    return Line(theta_p, float(project_point(theta_p, p)))


def renormalize(ifs: IfsSpec, a: str, line: Line) -> Line:
    """T_a(line) = f_a^{-1}(line)."""
    return renormalize_map(ifs.maps[a], line)


def renormalize_word(ifs: IfsSpec, w: str | Iterable[str], line: Line) -> Line:
    """T_w = T_{w_k} o ... o T_{w_1}, computed as (f_{w_1} o ... o f_{w_k})^{-1}."""
    return renormalize_map(compose_word(ifs, w), line)


def renormalize_via_points(ifs: IfsSpec, w: str | Iterable[str], line: Line) -> Line:
    """Reference route for T_w: push two points of the line through f_w^{-1}.

    Fully independent of the angle arithmetic above (direction comes out of
    atan2); kept for cross-checking, not for hot paths.
    """
    g = invert_map(compose_word(ifs, w))
    p = line.carrier_point()
    q = p + line.direction()
    return line_from_two_points(apply_similarity(g, p), apply_similarity(g, q))
