"""Flat key=value run configuration with dotted section names.

Example:

    grid.nx = 33
    grid.ny = 33
    sbp.order = 2
    scenario.name = quiescent-box
    scenario.interface_y = 0.5

Unknown keys are rejected so typos fail loudly instead of silently running
the defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass
class GridConfig:
    nx: int = 33
    ny: int = 33
    x0: float = 0.0
    x1: float = 1.0
    y0: float = 0.0
    y1: float = 1.0


@dataclass
class FluidsConfig:
    rho_l: float = 1000.0
    rho_g: float = 1.0
    mu_l: float = 1e-2
    mu_g: float = 1e-4


@dataclass
class TimeConfig:
    dt: float = 0.0
    t_end: float = 1.0
    cfl: float = 0.4
    dt_mode: str = "cfl"
    dt_max: float = 1.0
    max_steps: int = 100000
    rk_scheme: str = "rk4"


@dataclass
class OutputConfig:
    dir: str = "out"
    snapshot_every: int = 0  # 0 disables interior snapshots


@dataclass
class RunFlags:
    assert_mode: bool = False
    assert_tol: float = 1e-11
    project: bool = True
    kappa: float = 0.0
    sigma0: float = 1.0
    sigma1: float = -0.5
    sigma2: float = -1.0


@dataclass
class BcOverride:
    kind: str = "scenario"  # scenario | wall | inflow | outflow | auto
    data: str = "scenario"  # scenario | zero


@dataclass
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    order: int = 2
    fluids: FluidsConfig = field(default_factory=FluidsConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    run: RunFlags = field(default_factory=RunFlags)
    scenario_name: str = "quiescent-box"
    scenario_params: dict = field(default_factory=dict)
    bc_overrides: dict = field(default_factory=dict)


_INT_KEYS = {
    "grid.nx": ("grid", "nx"), "grid.ny": ("grid", "ny"),
    "sbp.order": (None, "order"),
    "time.max_steps": ("time", "max_steps"),
    "output.snapshot_every": ("output", "snapshot_every"),
}
_FLOAT_KEYS = {
    "grid.x0": ("grid", "x0"), "grid.x1": ("grid", "x1"),
    "grid.y0": ("grid", "y0"), "grid.y1": ("grid", "y1"),
    "fluids.rho_l": ("fluids", "rho_l"), "fluids.rho_g": ("fluids", "rho_g"),
    "fluids.mu_l": ("fluids", "mu_l"), "fluids.mu_g": ("fluids", "mu_g"),
    "time.dt": ("time", "dt"), "time.t_end": ("time", "t_end"),
    "time.cfl": ("time", "cfl"), "time.dt_max": ("time", "dt_max"),
    "run.assert_tol": ("run", "assert_tol"), "run.kappa": ("run", "kappa"),
    "run.sigma0": ("run", "sigma0"), "run.sigma1": ("run", "sigma1"),
    "run.sigma2": ("run", "sigma2"),
}
_STR_KEYS = {
    "time.dt_mode": ("time", "dt_mode"), "time.rk_scheme": ("time", "rk_scheme"),
    "output.dir": ("output", "dir"),
    "scenario.name": (None, "scenario_name"),
}
_BOOL_KEYS = {"run.assert_mode": ("run", "assert_mode"),
              "run.project": ("run", "project")}

_EDGES = ("west", "east", "south", "north")
_BC_KINDS = ("scenario", "wall", "inflow", "outflow", "auto")
_BC_DATA = ("scenario", "zero")


def parse_config_text(text: str) -> dict:
    """Parse key = value lines into an ordered str->str dict."""
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if not key or not val:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = val
    return pairs


def _convert(key, val, kind):
    try:
        if kind is bool:
            low = val.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(val)
        return kind(val)
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {val!r} as {kind.__name__}") from None


def config_from_pairs(pairs: dict) -> RunConfig:
    cfg = RunConfig()
    for key, val in pairs.items():
        if key in _INT_KEYS:
            section, attr = _INT_KEYS[key]
            target = cfg if section is None else getattr(cfg, section)
            setattr(target, attr, _convert(key, val, int))
        elif key in _FLOAT_KEYS:
            section, attr = _FLOAT_KEYS[key]
            target = cfg if section is None else getattr(cfg, section)
            setattr(target, attr, _convert(key, val, float))
        elif key in _STR_KEYS:
            section, attr = _STR_KEYS[key]
            target = cfg if section is None else getattr(cfg, section)
            setattr(target, attr, val)
        elif key in _BOOL_KEYS:
            section, attr = _BOOL_KEYS[key]
            setattr(getattr(cfg, section), attr, _convert(key, val, bool))
        elif key.startswith("scenario."):
            cfg.scenario_params[key[len("scenario."):]] = val
        elif key.startswith("bc."):
            parts = key.split(".")
            if len(parts) != 3 or parts[1] not in _EDGES or parts[2] not in ("kind", "data"):
                raise ConfigError(f"unknown key {key!r}")
            ov = cfg.bc_overrides.setdefault(parts[1], BcOverride())
            if parts[2] == "kind":
                if val not in _BC_KINDS:
                    raise ConfigError(f"key {key!r}: kind must be one of {_BC_KINDS}")
                ov.kind = val
            else:
                if val not in _BC_DATA:
                    raise ConfigError(f"key {key!r}: data must be one of {_BC_DATA}")
                ov.data = val
        else:
            raise ConfigError(f"unknown key {key!r}")
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.order not in (2, 4):
        raise ConfigError(f"sbp.order must be 2 or 4, got {cfg.order}")
    if cfg.grid.nx < 2 or cfg.grid.ny < 2:
        raise ConfigError("grid.nx and grid.ny must be at least 2")
    if not (cfg.grid.x1 > cfg.grid.x0 and cfg.grid.y1 > cfg.grid.y0):
        raise ConfigError("grid extents must satisfy x1 > x0 and y1 > y0")
    for name in ("rho_l", "rho_g"):
        if getattr(cfg.fluids, name) <= 0.0:
            raise ConfigError(f"fluids.{name} must be positive")
    for name in ("mu_l", "mu_g"):
        if getattr(cfg.fluids, name) < 0.0:
            raise ConfigError(f"fluids.{name} must be nonnegative")
    if cfg.time.dt_mode not in ("cfl", "fixed"):
        raise ConfigError("time.dt_mode must be 'cfl' or 'fixed'")
    if cfg.time.rk_scheme != "rk4":
        raise ConfigError("time.rk_scheme must be 'rk4'")
    if cfg.time.dt_mode == "fixed" and cfg.time.dt <= 0.0:
        raise ConfigError("time.dt must be positive when dt_mode = fixed")
    if not (0.0 < cfg.time.cfl <= 2.0):
        raise ConfigError("time.cfl must lie in (0, 2]")
    if cfg.time.t_end < 0.0:
        raise ConfigError("time.t_end must be nonnegative")
    if cfg.time.max_steps < 1:
        raise ConfigError("time.max_steps must be at least 1")
    if cfg.output.snapshot_every < 0:
        raise ConfigError("output.snapshot_every must be nonnegative")
    if cfg.run.assert_tol <= 0.0:
        raise ConfigError("run.assert_tol must be positive")
    if cfg.run.sigma0 < 0.5:
        raise ConfigError("run.sigma0 must be at least 0.5")
    if cfg.run.kappa < 0.0:
        raise ConfigError("run.kappa must be nonnegative")


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    return config_from_pairs(parse_config_text(text))


def format_config(cfg: RunConfig) -> str:
    """Canonical echo of the effective configuration, one key per line."""
    lines = []
    for key, (section, attr) in {**_INT_KEYS, **_FLOAT_KEYS, **_STR_KEYS, **_BOOL_KEYS}.items():
        target = cfg if section is None else getattr(cfg, section)
        val = getattr(target, attr)
        if isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = repr(val)
        lines.append(f"{key} = {val}")
    for pkey in sorted(cfg.scenario_params):
        lines.append(f"scenario.{pkey} = {cfg.scenario_params[pkey]}")
    for edge in _EDGES:
        if edge in cfg.bc_overrides:
            ov = cfg.bc_overrides[edge]
            lines.append(f"bc.{edge}.kind = {ov.kind}")
            lines.append(f"bc.{edge}.data = {ov.data}")
    lines.sort()
    return "\n".join(lines) + "\n"
