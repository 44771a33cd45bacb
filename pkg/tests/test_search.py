import math
from itertools import product

import numpy as np
import pytest

from ifsproj import (
    CoverageTester,
    GridGeometry,
    OmegaAssignment,
    Perturbation,
    build_perturbed_ifs,
    closeness_report,
    compose,
    draw_assignment,
    epsilon_distance,
    estimate_success_prob,
    get_builtin,
    perturb_map,
    renormalize_arrays,
    search_omega0,
    Line,
)
from test_recurrence import flat_candidate, lines_meeting_unit_square

RHO = 4.0**-4


@pytest.fixture(scope="module")
def recurrent_instance():
    """Four-corner system with the lines-meeting-I candidate: genuinely
    recurrent, so near-identity perturbations give full coverage."""
    ifs = get_builtin("four_corner")
    geom = GridGeometry(181, t_max=1.2)
    cand = flat_candidate(geom, 0.05, lines_meeting_unit_square(geom))
    return ifs, cand


def test_perturbation_validates_gamma():
    Perturbation(0.1, (0.99, -0.99))
    with pytest.raises(ValueError):
        Perturbation(0.1, (1.0, 0.0))
    with pytest.raises(ValueError):
        Perturbation(0.1, (0.0, -1.3))


def test_assignment_json_roundtrip():
    a = OmegaAssignment(
        {
            "a": Perturbation(0.123456789, (0.25, -0.5)),
            "b": Perturbation(-0.2, (0.0, 0.875)),
        }
    )
    back = OmegaAssignment.from_json_dict(a.to_json_dict())
    assert back == a  # bit-exact floats through json dicts


def test_perturb_map_geometry():
    ifs = get_builtin("sierpinski")
    f = ifs.maps["b"]
    center = f((0.5, 0.5))
    rotated = perturb_map(f, Perturbation(0.3, (0.0, 0.0)), c1=8.0, rho=RHO)
    # pure rotation about the image square center keeps the center put
    assert np.allclose(rotated((0.5, 0.5)), center)
    assert rotated.ratio == f.ratio and rotated.reflect == f.reflect
    assert rotated.angle == pytest.approx(f.angle + 0.3)
    shifted = perturb_map(f, Perturbation(0.0, (0.5, -0.25)), c1=8.0, rho=RHO)
    assert np.allclose(
        shifted((0.5, 0.5)) - center, np.array([0.5, -0.25]) * 8.0 * RHO
    )


def test_build_perturbed_requires_part_one_domain():
    ifs = get_builtin("sierpinski")
    with pytest.raises(ValueError, match="part_one"):
        build_perturbed_ifs(
            ifs, OmegaAssignment({"a": Perturbation(0.0, (0.0, 0.0))}), 8.0, RHO
        )


def test_random_draws_stay_epsilon_close(rng):
    """With rho <= eps/(2 c1 c0) every admissible perturbation is eps-close."""
    ifs = get_builtin("sierpinski")
    worst = 0.0
    for _ in range(100):
        a = draw_assignment(rng, ifs, 0.3)
        pert = build_perturbed_ifs(ifs, a, 8.0, RHO)
        rep = closeness_report(ifs, pert, 0.3, 8.0, RHO, 2.0)
        assert rep["epsilon_ok"], rep
        worst = max(worst, rep["epsilon_distance"])
    assert rep["sufficient_bound_ok"]
    assert worst < 0.3


def test_search_accepts_on_recurrent_instance(recurrent_instance):
    ifs, cand = recurrent_instance
    out = search_omega0(ifs, cand, budget=5, seed=0, mode="iid", c1=1e-9, epsilon=1e-9)
    assert out.omega0 is not None
    assert out.accepted_attempt == 0
    assert out.coverage == 1.0
    assert out.check_report is not None and out.check_report.all_recurred


def test_per_symbol_accepts_on_recurrent_instance(recurrent_instance):
    ifs, cand = recurrent_instance
    out = search_omega0(
        ifs, cand, budget=10, seed=0, mode="per_symbol", c1=1e-9, epsilon=1e-9, run_check=False
    )
    assert out.omega0 is not None and out.coverage == 1.0


def test_estimate_success_prob(recurrent_instance):
    ifs, cand = recurrent_instance
    u = Line(0.0, 0.5)
    p = estimate_success_prob(ifs, u, cand, samples=16, seed=1, c1=1e-9, epsilon=1e-9)
    assert p == 1.0
    with pytest.raises(ValueError, match="not on the probe net"):
        estimate_success_prob(ifs, Line(0.0, -0.9), cand, samples=4, seed=1)


def test_probe_is_consistent_with_full_eval(recurrent_instance, rng):
    ifs, cand = recurrent_instance
    tester = CoverageTester(ifs, cand, c1=0.5, epsilon=0.3)
    a = draw_assignment(rng, ifs, 0.3)
    full, _ = tester.coverage(a)
    probe, _ = tester.coverage(a, tester.probe_idx)
    assert np.array_equal(full[tester.probe_idx], probe)


def test_coverage_witnesses_reverify(recurrent_instance, rng):
    ifs, cand = recurrent_instance
    tester = CoverageTester(ifs, cand, c1=0.5, epsilon=0.3)
    a = draw_assignment(rng, ifs, 0.3)
    covered, witness = tester.coverage(a)
    maps = {
        s: perturb_map(ifs.maps[s], a.omegas[s], 0.5, cand.rho) if s in a.omegas else ifs.maps[s]
        for s in ifs.alphabet
    }
    words = [compose(maps[b1], maps[b2]) for b1, b2 in product(ifs.alphabet, repeat=2)]
    member0 = cand.membership("L0")
    idx = np.flatnonzero(covered)[:: max(1, covered.sum() // 64)]
    for i in idx:
        g = words[witness[i]]
        th, tt = renormalize_arrays(g, tester.thetas[[i]], tester.ts[[i]])
        assert member0.contains(th, tt, tester.slack)[0]


def test_search_is_deterministic(recurrent_instance):
    ifs, cand = recurrent_instance
    kw = dict(budget=6, seed=11, c1=0.5, epsilon=0.3, run_check=False)
    a = search_omega0(ifs, cand, mode="iid", **kw)
    b = search_omega0(ifs, cand, mode="iid", **kw)
    assert a.to_json_dict() == b.to_json_dict()
    c = search_omega0(ifs, cand, mode="per_symbol", **kw)
    d = search_omega0(ifs, cand, mode="per_symbol", **kw)
    assert c.to_json_dict() == d.to_json_dict()


def test_search_reports_best_on_failure(recurrent_instance):
    ifs, cand = recurrent_instance
    # c1 large enough that random translations break coverage
    out = search_omega0(
        ifs, cand, budget=4, seed=2, mode="iid", c1=2.0, epsilon=0.3, run_check=False
    )
    if out.omega0 is None:
        assert out.best_assignment is not None
        assert 0.0 < out.coverage < 1.0
        assert out.estimated_failure_prob == pytest.approx(1.0 - out.coverage)


def test_unknown_mode_rejected(recurrent_instance):
    ifs, cand = recurrent_instance
    with pytest.raises(ValueError, match="mode"):
        search_omega0(ifs, cand, budget=1, seed=0, mode="annealing")
