import warnings
from types import SimpleNamespace

import numpy as np
import pytest

from ifsproj import RunConfig, SliceBuilder, build_candidate, build_E


@pytest.fixture(scope="session")
def desk():
    """Full Sierpinski pipeline at the default desk-scale constants.

    Shared by the measure/recurrence module tests and the acceptance
    criteria; takes a few seconds to build once.
    """
    cfg = RunConfig(ifs="sierpinski")
    res = cfg.resolve()
    geom = cfg.geometry()
    E = build_E(res.ifs, cfg.n_theta, cfg.rho, res.delta, epsilon=cfg.epsilon)
    slices = SliceBuilder(res.ifs, E, geom, res.slice_params).all_rows()
    cand = build_candidate(res.ifs, E, slices, cfg.rho, geom=geom)
    return SimpleNamespace(cfg=cfg, res=res, ifs=res.ifs, geom=geom, E=E, cand=cand)


@pytest.fixture(autouse=True)
def _quiet_containment_warnings():
    # perturbed systems poke slightly outside I by design
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*send the unit square outside itself")
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(0)
