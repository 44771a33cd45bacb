"""Run configuration: constants, grids, budgets, and their derived values.

A config file is JSON with an "ifs" entry (builtin name, file path, or
inline spec) plus optional "constants" and "grid" blocks; flat keys are
accepted too. Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .ifs import IfsSpec, ifs_from_json_dict, load_ifs
from .measure import measured_c9
from .recurrence import GridGeometry, SliceParams
from .systems import BUILTIN, get_builtin

_CONSTANT_KEYS = (
    "rho",
    "epsilon",
    "c0",
    "c1",
    "c2",
    "c3",
    "c5",
    "c6",
    "c7",
    "c9",
    "c10",
    "delta",
)
_GRID_KEYS = (
    "theta_pitch",
    "t_pitch",
    "t_max",
    "n_phi",
    "grid_size",
    "raster_size",
    "max_depth",
    "word_budget",
    "search_budget",
    "survivor_budget",
    "n_theta_sample",
    "cert_resolution",
)


@dataclass(frozen=True)
class RunConfig:
    """All knobs of a pipeline run. None means "derive the default"."""

    ifs: dict | str = "sierpinski"
    rho: float = 4.0**-4
    epsilon: float = 0.3
    c0: float = 2.0
    c1: float = 8.0
    c2: float = 1.0  # report-only scale constant
    c3: float = 16.0  # report-only neighborhood constant
    c5: float | None = None  # None: smallest value excluding < epsilon/2 of angles
    c6: float = 0.05
    c7: float | None = None  # None: c6 * c10 * epsilon / (4 c9)
    c9: float | None = None  # None: measured comparability constant
    c10: float | None = None  # None: c9^-2 / 16
    delta: float | None = None  # None: sqrt(rho)/8
    theta_pitch: float | None = None  # None: pi / ceil(4 pi / rho)
    t_pitch: float | None = None  # must equal theta_pitch when given
    t_max: float = 1.0
    n_phi: int = 33
    grid_size: int | None = None  # scan rows; None: full theta grid
    raster_size: int = 512
    max_depth: int = 8
    word_budget: int = 6_000_000
    search_budget: int = 10_000
    survivor_budget: int = 200_000
    n_theta_sample: int = 10
    cert_resolution: float = 1e-3
    search_mode: str = "iid"
    seed: int = 0
    out: str = "out"
    workers: int = 1

    def __post_init__(self):
        pos = {
            "rho": self.rho,
            "epsilon": self.epsilon,
            "c0": self.c0,
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "c6": self.c6,
            "t_max": self.t_max,
            "cert_resolution": self.cert_resolution,
        }
        for name in ("c5", "c7", "c9", "c10", "delta", "theta_pitch", "t_pitch"):
            v = getattr(self, name)
            if v is not None:
                pos[name] = v
        for name, v in pos.items():
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name}: must be a positive number, got {v!r}")
        if self.rho >= 1:
            raise ConfigError(f"rho: must be < 1, got {self.rho}")
        if self.epsilon >= math.pi / 2:
            raise ConfigError(f"epsilon: must be < pi/2, got {self.epsilon}")
        if self.n_phi % 2 == 0 or self.n_phi < 1:
            raise ConfigError(f"n_phi: must be a positive odd integer, got {self.n_phi}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"seed: must be an unsigned integer, got {self.seed!r}")
        if self.search_mode not in ("iid", "per_symbol"):
            raise ConfigError(f"search_mode: must be 'iid' or 'per_symbol', got {self.search_mode!r}")
        for name in (
            "max_depth",
            "word_budget",
            "search_budget",
            "survivor_budget",
            "n_theta_sample",
            "raster_size",
            "workers",
        ):
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise ConfigError(f"{name}: must be a positive integer, got {v!r}")
        if self.grid_size is not None and not (isinstance(self.grid_size, int) and self.grid_size >= 1):
            raise ConfigError(f"grid_size: must be a positive integer, got {self.grid_size!r}")
        if self.t_pitch is not None:
            ref = self.theta_pitch
            if ref is None or abs(self.t_pitch - ref) > 1e-12:
                raise ConfigError("t_pitch: the grid uses one shared pitch; set theta_pitch instead")

    def load_ifs_spec(self, check_containment: bool = True) -> IfsSpec:
        src = self.ifs
        if isinstance(src, str):
            if src in BUILTIN:
                return get_builtin(src)
            try:
                return load_ifs(src, check_containment=check_containment)
            except FileNotFoundError:
                raise ConfigError(
                    f"ifs: {src!r} is neither a builtin ({', '.join(sorted(BUILTIN))}) nor a readable file"
                ) from None
        if isinstance(src, dict):
            return ifs_from_json_dict(src, check_containment=check_containment)
        raise ConfigError(f"ifs: expected a name, path, or inline spec, got {type(src).__name__}")

    @property
    def n_theta(self) -> int:
        if self.theta_pitch is not None:
            return max(1, math.ceil(math.pi / self.theta_pitch))
        return math.ceil(4.0 * math.pi / self.rho)

    def geometry(self) -> GridGeometry:
        return GridGeometry(self.n_theta, t_max=self.t_max)

    def delta_value(self) -> float:
        return math.sqrt(self.rho) / 8.0 if self.delta is None else self.delta

    def resolve(self, ifs: IfsSpec | None = None) -> "ResolvedConstants":
        """Fill in measured/derived constants for a concrete system."""
        ifs = self.load_ifs_spec() if ifs is None else ifs
        c9 = measured_c9(ifs, self.rho) if self.c9 is None else self.c9
        c10 = c9**-2 / 16.0 if self.c10 is None else self.c10
        c7 = self.c6 * c10 * self.epsilon / (4.0 * c9) if self.c7 is None else self.c7
        d = ifs.dimension
        n_required = max(1, round(self.c6**2 * self.rho ** (-(d - 1) / 2)))
        c8_ref = self.c6**2 * c10 / (16.0 * c9)
        return ResolvedConstants(
            ifs=ifs,
            dimension=d,
            c9=c9,
            c10=c10,
            c7=c7,
            n_required=n_required,
            c8_ref=c8_ref,
            delta=self.delta_value(),
            slice_params=SliceParams(
                rho=self.rho,
                epsilon=self.epsilon,
                c7=c7,
                n_phi=self.n_phi,
                n_required=n_required,
            ),
        )

    def to_json_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                d[f.name] = v
        return d


@dataclass(frozen=True)
class ResolvedConstants:
    ifs: IfsSpec
    dimension: float
    c9: float
    c10: float
    c7: float
    n_required: int
    c8_ref: float
    delta: float
    slice_params: SliceParams


def config_from_json_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"config: expected a JSON object, got {type(data).__name__}")
    flat: dict = {}

    def take(block: dict, allowed: tuple[str, ...], label: str):
        for k, v in block.items():
            if k not in allowed:
                raise ConfigError(f"{label}.{k}: unknown key")
            if k in flat:
                raise ConfigError(f"{label}.{k}: given twice")
            flat[k] = v

    known = {f.name for f in fields(RunConfig)}
    for k, v in data.items():
        if k == "constants":
            take(v, _CONSTANT_KEYS, "constants")
        elif k == "grid":
            take(v, _GRID_KEYS, "grid")
        elif k in known:
            if k in flat:
                raise ConfigError(f"{k}: given twice")
            flat[k] = v
        else:
            raise ConfigError(f"{k}: unknown key")
    return RunConfig(**flat)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config: no such file {path!r}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path!r}: {exc}") from None
    return config_from_json_dict(data)


def override(cfg: RunConfig, **kwargs) -> RunConfig:
    """Apply CLI flag overrides, dropping None values."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    return replace(cfg, **updates) if updates else cfg
