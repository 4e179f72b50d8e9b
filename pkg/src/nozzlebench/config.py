"""Run configuration: YAML schema, validation, defaults, and echoing.

The effective config written next to the run artifacts parses back to
an identical RunConfig (round-trip fixpoint), so a run can always be
reproduced from its own directory.
"""

from dataclasses import dataclass, field, fields, asdict

import yaml

from nozzlebench import CONFIG_SCHEMA_VERSION
from nozzlebench.cases import DEFAULT_DENSITY, DEFAULT_VISCOSITY
from nozzlebench.errors import ConfigError

_SOLVER_MODES = ("direct", "gmres+pcd")
_NONLINEAR_MODES = ("picard", "semi-implicit")

_DEFAULT_STATIONS = [
    -0.088, -0.064, -0.048, -0.02, -0.008, 0.0,
    0.008, 0.016, 0.024, 0.032, 0.06, 0.08,
]


@dataclass
class RunConfig:
    """Validated, fully-defaulted description of one benchmark run."""

    re_throat: float = 500.0
    rho: float = DEFAULT_DENSITY
    mu: float = DEFAULT_VISCOSITY
    dt: float = 1e-3
    t_end: float = 0.05
    order: int = 1
    solver_mode: str = "direct"
    nonlinear_mode: str = "picard"
    mode: str = "steady"  # steady | transient
    inlet_radius: float = 0.006
    throat_radius: float = 0.002
    inlet_length: float = 0.04
    convergent_length: float = 0.022676
    throat_length: float = 0.04
    outlet_length: float = 0.1
    sizing_inlet: float = 2.4e-3
    sizing_convergent: float = 1.6e-3
    sizing_throat: float = 8e-4
    sizing_expansion: float = 1.6e-3
    refine_levels: int = 0
    stations: list = field(default_factory=lambda: list(_DEFAULT_STATIONS))
    velocity_data: list = field(default_factory=list)
    pressure_data: list = field(default_factory=list)
    out_dir: str = "runs"
    seed: int = 0

    def __post_init__(self):
        _validate(self)


def _require(cond, key, constraint):
    if not cond:
        raise ConfigError(f"{key}: {constraint}", key=key)


def _validate(cfg: RunConfig):
    pos = (
        "re_throat", "rho", "mu", "dt", "t_end", "inlet_radius",
        "throat_radius", "inlet_length", "convergent_length",
        "throat_length", "outlet_length", "sizing_inlet",
        "sizing_convergent", "sizing_throat", "sizing_expansion",
    )
    for key in pos:
        val = getattr(cfg, key)
        _require(isinstance(val, (int, float)) and not isinstance(val, bool),
                 key, "must be a number")
        _require(val > 0, key, "must be positive")
        setattr(cfg, key, float(val))
    _require(isinstance(cfg.order, int) and cfg.order in (1, 2),
             "order", "must be 1 or 2")
    _require(isinstance(cfg.refine_levels, int) and 0 <= cfg.refine_levels <= 4,
             "refine_levels", "must be an integer in [0, 4]")
    _require(isinstance(cfg.seed, int), "seed", "must be an integer")
    _require(cfg.solver_mode in _SOLVER_MODES,
             "solver_mode", f"must be one of {_SOLVER_MODES}")
    _require(cfg.nonlinear_mode in _NONLINEAR_MODES,
             "nonlinear_mode", f"must be one of {_NONLINEAR_MODES}")
    _require(cfg.mode in ("steady", "transient"),
             "mode", "must be steady or transient")
    _require(cfg.throat_radius < cfg.inlet_radius,
             "throat_radius", "must be smaller than inlet_radius")
    _require(isinstance(cfg.stations, list) and len(cfg.stations) > 0,
             "stations", "must be a non-empty list of z locations")
    cfg.stations = [float(s) for s in cfg.stations]
    for key in ("velocity_data", "pressure_data"):
        val = getattr(cfg, key)
        _require(isinstance(val, list), key, "must be a list of file paths")
        setattr(cfg, key, [str(p) for p in val])
    _require(isinstance(cfg.out_dir, str) and cfg.out_dir,
             "out_dir", "must be a non-empty path")


_KNOWN = {f.name for f in fields(RunConfig)}


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    unknown = sorted(set(raw) - _KNOWN - {"schema"})
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}",
                          key=unknown[0])
    schema = raw.get("schema", CONFIG_SCHEMA_VERSION)
    if schema != CONFIG_SCHEMA_VERSION:
        raise ConfigError(
            f"schema: expected {CONFIG_SCHEMA_VERSION!r}, got {schema!r}",
            key="schema",
        )
    kwargs = {k: v for k, v in raw.items() if k != "schema"}
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:  # wrong value shape for a dataclass field
        raise ConfigError(str(exc)) from exc


def parse_config(path) -> RunConfig:
    """Load and validate a YAML config file, filling all defaults."""
    try:
        with open(path) as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if raw is None:
        raw = {}
    return config_from_dict(raw)


def config_to_dict(cfg: RunConfig) -> dict:
    out = {"schema": CONFIG_SCHEMA_VERSION}
    out.update(asdict(cfg))
    return out


def dump_config(cfg: RunConfig, path):
    """Echo the effective config; every defaulted value is spelled out."""
    with open(path, "w") as f:
        yaml.safe_dump(config_to_dict(cfg), f, sort_keys=True,
                       default_flow_style=False)
