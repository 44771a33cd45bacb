import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ifsproj import (
    Line,
    Similarity,
    compose_word,
    get_builtin,
    invert_map,
    line_from_two_points,
    line_square_intersects,
    make_ifs,
    map_square,
    canonical_angle,
    project_point,
    project_square,
    renormalize_arrays,
    renormalize_map,
    renormalize_params,
    renormalize_via_points,
    renormalize_word,
)

similarities = st.builds(
    Similarity,
    ratio=st.floats(0.15, 0.9),
    angle=st.floats(-7.0, 7.0),
    reflect=st.booleans(),
    translation=st.tuples(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5)),
)
lines = st.builds(Line, theta=st.floats(-9.0, 9.0), t=st.floats(-2.0, 2.0))


def line_close(u: Line, v: Line, tol: float = 1e-9) -> bool:
    """Equality of unoriented lines, allowing the representative to sit on
    either side of the theta wrap."""
    if abs(u.theta - v.theta) < tol and abs(u.t - v.t) < tol:
        return True
    wrap = math.pi - abs(u.theta - v.theta)
    return wrap < tol and abs(u.t + v.t) < tol


def test_canonical_angle():
    assert canonical_angle(0.0) == (0.0, 0)
    th, k = canonical_angle(3 * math.pi / 2)
    assert th == pytest.approx(math.pi / 2) and k == 1
    th, k = canonical_angle(-math.pi / 4)
    assert th == pytest.approx(3 * math.pi / 4) and k == -1
    # the representative never lands on pi itself
    th, k = canonical_angle(math.pi - 1e-18)
    assert 0.0 <= th < math.pi


def test_line_canonicalizes():
    u = Line(3 * math.pi / 2, 0.5)
    assert u.theta == pytest.approx(math.pi / 2)
    assert u.t == pytest.approx(-0.5)


def test_project_point_axes():
    assert project_point(0.0, (0.3, 0.8)) == pytest.approx(0.8)
    assert project_point(math.pi / 2, (0.3, 0.8)) == pytest.approx(-0.3)


def test_line_from_two_points():
    u = line_from_two_points((0.0, 0.5), (1.0, 0.5))
    assert line_close(u, Line(0.0, 0.5))
    v = line_from_two_points((0.25, 0.0), (0.25, 2.0))
    assert line_close(v, Line(math.pi / 2, -0.25))
    with pytest.raises(ValueError):
        line_from_two_points((0.1, 0.1), (0.1, 0.1))


def test_project_square_and_intersection():
    sq = map_square(Similarity(0.5, 0.0, False, (0.25, 0.25)))
    iv = project_square(0.0, sq)
    assert (iv.lo, iv.hi) == (pytest.approx(0.25), pytest.approx(0.75))
    assert line_square_intersects(Line(0.0, 0.5), sq)
    assert not line_square_intersects(Line(0.0, 0.8), sq)
    # tol rescues a boundary graze
    assert line_square_intersects(Line(0.0, 0.75 + 1e-13), sq, tol=1e-9)


@given(similarities, lines, st.floats(-3.0, 3.0))
@settings(max_examples=300, deadline=None)
def test_renormalize_equivariance(f, u, s):
    """p on u iff f^-1(p) on T_f(u)."""
    p = u.carrier_point() + s * u.direction()
    v = renormalize_map(f, u)
    q = invert_map(f)(p)
    assert abs(project_point(v.theta, q) - v.t) < 1e-9


def test_renormalize_oracle_no_rotation():
    # f shrinks toward the origin by 1/2; a horizontal line at height t pulls
    # back to height 2t
    f = Similarity(0.5, 0.0, False, (0.0, 0.0))
    v = renormalize_map(f, Line(0.0, 0.3))
    assert line_close(v, Line(0.0, 0.6))


def test_renormalize_oracle_reflection():
    f = Similarity(0.5, 0.0, True, (0.0, 0.0))
    v = renormalize_map(f, Line(0.0, 0.3))
    # reflection in y negates the height
    assert line_close(v, Line(0.0, -0.6))


@given(similarities, lines)
@settings(max_examples=300, deadline=None)
def test_renormalize_routes_agree(f, u):
    v1 = renormalize_map(f, u)
    theta2, t2 = renormalize_params(f, u.theta, np.array([u.t]))
    assert line_close(v1, Line(theta2, float(t2[0])), tol=1e-8)
    th3, t3 = renormalize_arrays(f, np.array([u.theta]), np.array([u.t]))
    assert line_close(v1, Line(float(th3[0]), float(t3[0])), tol=1e-8)


@given(lines, st.integers(0, 8))
@settings(max_examples=200, deadline=None)
def test_via_points_reference_route(u, word_seed):
    ifs = get_builtin("sierpinski")
    words = ["ab", "bc", "ca", "cc", "aa", "ba", "cb", "ac", "bb"]
    w = words[word_seed]
    assert line_close(renormalize_word(ifs, w, u), renormalize_via_points(ifs, w, u), tol=1e-8)


def test_composition_law_random_systems(rng):
    """Letterwise renormalization equals renormalizing by the composed map,
    with the word order folded."""
    for trial in range(100):
        maps = {
            a: Similarity(
                ratio=rng.uniform(0.2, 0.45),
                angle=rng.uniform(0, 2 * math.pi),
                reflect=bool(rng.integers(2)),
                translation=tuple(rng.uniform(0.1, 0.5, size=2)),
            )
            for a in "ab"
        }
        ifs = make_ifs(maps, check_containment=False)
        w = "".join(rng.choice(["a", "b"], size=2))
        u = Line(rng.uniform(0, math.pi), rng.uniform(-1.5, 1.5))
        folded = renormalize_map(compose_word(ifs, w), u)
        letterwise = renormalize_word(ifs, w, u)
        assert line_close(folded, letterwise, tol=1e-10)


@given(similarities, st.floats(0.0, 3.1), st.floats(-2.0, 2.0))
@settings(max_examples=200, deadline=None)
def test_arrays_route_handles_wrap(f, theta, t):
    th, tt = renormalize_arrays(f, np.array([theta]), np.array([t]))
    assert 0.0 <= float(th[0]) < math.pi
    assert np.isfinite(tt).all()
