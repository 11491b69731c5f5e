"""Run configuration: flat ``key = value`` files with ``#`` comments.

Unknown keys, duplicate keys, type errors and invalid combinations are
hard errors with the offending line number.  Scenario geometry is given
in units of the Burgers vector b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .material import MODE_ANALYSIS, MODE_PHYSICAL, ModelParams, calibrated_h0
from .spectral import GridSpec

TAU = 2.0 * math.pi

__all__ = ["ConfigError", "RunConfig", "parse_config", "load_config",
           "config_keys_help"]


class ConfigError(ValueError):
    """Configuration rejected; message carries the line number."""


def _as_bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _as_float_or(sentinel: str):
    def conv(text: str):
        if text.lower() == sentinel:
            return None
        return float(text)
    return conv


def _as_t_end(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


# key -> (converter, default); None default means "required"
_KEYS: dict = {
    "nx": (int, 64),
    "ny": (int, 64),
    "length_x": (float, TAU),
    "length_y": (float, TAU),
    "model_mode": (str, MODE_PHYSICAL),
    "eps": (_as_float_or("auto"), None),
    "eps_cells": (float, 1.0),
    "beta": (float, 0.0),
    "m0": (float, 1.0),
    "h0": (_as_float_or("auto"), None),
    "shear_g": (float, 1.0),
    "nu": (float, 0.3),
    "b": (float, TAU / 300.0),
    "e0": (float, 0.005),
    "theta": (float, 0.0),
    "m_exp": (int, 2),
    "f_app": (float, 0.0),
    "dt": (_as_float_or("auto"), None),
    "dt_safety": (float, 0.4),
    "t_end": (_as_t_end, math.inf),
    "max_steps": (int, 10_000_000),
    "timeseries_every": (int, 100),
    "snapshot_every": (int, 0),
    "scenario": (str, None),
    "ellipse_l1": (float, 80.0),
    "ellipse_l2": (float, 40.0),
    "ellipse_cx": (float, 0.0),
    "ellipse_cy": (float, 0.0),
    "circle1_r": (float, 40.0),
    "circle1_cx": (float, -47.0),
    "circle1_cy": (float, 0.0),
    "circle2_r": (float, 25.0),
    "circle2_cx": (float, 28.0),
    "circle2_cy": (float, 0.0),
    "field_path": (str, ""),
    "output_dir": (str, "out"),
    "seed": (int, 0),
    "perturb": (float, 0.0),
    "pgm": (_as_bool, False),
    "figures": (_as_bool, True),
    "dealias": (_as_bool, False),
    "scheme": (str, "euler"),
}

_SCENARIOS = ("ellipse", "two_circles", "custom_field")
_SCHEMES = ("euler", "semi_implicit")


@dataclass
class RunConfig:
    """Fully validated run configuration (absolute units)."""

    nx: int
    ny: int
    length_x: float
    length_y: float
    model_mode: str
    eps: float
    beta: float
    m0: float
    h0: float
    shear_g: float
    nu: float
    b: float
    e0: float
    theta: float
    m_exp: int
    f_app: float
    dt: float | None          # None -> suggest_dt
    dt_safety: float
    t_end: float
    max_steps: int
    timeseries_every: int
    snapshot_every: int
    scenario: str
    loops: list = field(default_factory=list)  # ("circle",cx,cy,r) / ("ellipse",cx,cy,a,b)
    field_path: str = ""
    output_dir: str = "out"
    seed: int = 0
    perturb: float = 0.0
    pgm: bool = False
    figures: bool = True
    dealias: bool = False
    scheme: str = "euler"

    def grid_spec(self) -> GridSpec:
        return GridSpec(self.nx, self.ny, self.length_x, self.length_y)

    def params(self) -> ModelParams:
        return ModelParams(eps=self.eps, beta=self.beta, m0=self.m0,
                           h0=self.h0, shear_g=self.shear_g, nu=self.nu,
                           b=self.b, e0=self.e0, theta=self.theta,
                           m_exp=self.m_exp, model_mode=self.model_mode,
                           f_app=self.f_app)


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Defaults follow the production setup: a 64^2 grid on [-pi, pi]^2,
    eps = eps_cells * dx, b = 2 pi / 300, e0 = 0.005, nu = 0.3,
    shear_g = 1, beta = 0, f_app = 0 and the calibrated h0.
    """
    raw: dict[str, tuple[str, int]] = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {ln}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(
                f"line {ln}: duplicate key {key!r} (first set on line {raw[key][1]})")
        raw[key] = (value, ln)

    def lineno(key: str) -> int:
        return raw[key][1] if key in raw else 0

    values: dict = {}
    for key, (conv, default) in _KEYS.items():
        if key in raw:
            value, ln = raw[key]
            try:
                values[key] = conv(value)
            except ValueError as exc:
                raise ConfigError(f"line {ln}: bad value for {key}: {exc}") from None
        else:
            values[key] = default

    if values["scenario"] is None:
        raise ConfigError("line 0: missing required key 'scenario'")
    if values["scenario"] not in _SCENARIOS:
        raise ConfigError(
            f"line {lineno('scenario')}: scenario must be one of {_SCENARIOS}")
    if values["scheme"] not in _SCHEMES:
        raise ConfigError(f"line {lineno('scheme')}: scheme must be one of {_SCHEMES}")

    try:
        grid = GridSpec(values["nx"], values["ny"],
                        values["length_x"], values["length_y"])
    except ValueError as exc:
        ln = max(lineno("nx"), lineno("ny"), lineno("length_x"), lineno("length_y"))
        raise ConfigError(f"line {ln}: {exc}") from None

    eps = values["eps"] if values["eps"] is not None \
        else values["eps_cells"] * grid.dx
    h0 = values["h0"] if values["h0"] is not None \
        else calibrated_h0(values["shear_g"], values["nu"], values["b"])

    if values["model_mode"] == MODE_ANALYSIS and values["theta"] <= 0:
        raise ConfigError(
            f"line {lineno('theta')}: analysis mode requires theta > 0")

    cfg = RunConfig(
        nx=values["nx"], ny=values["ny"],
        length_x=values["length_x"], length_y=values["length_y"],
        model_mode=values["model_mode"], eps=eps, beta=values["beta"],
        m0=values["m0"], h0=h0, shear_g=values["shear_g"], nu=values["nu"],
        b=values["b"], e0=values["e0"], theta=values["theta"],
        m_exp=values["m_exp"], f_app=values["f_app"], dt=values["dt"],
        dt_safety=values["dt_safety"], t_end=values["t_end"],
        max_steps=values["max_steps"],
        timeseries_every=values["timeseries_every"],
        snapshot_every=values["snapshot_every"], scenario=values["scenario"],
        field_path=values["field_path"], output_dir=values["output_dir"],
        seed=values["seed"], perturb=values["perturb"], pgm=values["pgm"],
        figures=values["figures"], dealias=values["dealias"],
        scheme=values["scheme"],
    )

    try:
        cfg.params()
    except ValueError as exc:
        raise ConfigError(f"line 0: invalid parameters: {exc}") from None

    b = cfg.b
    if cfg.scenario == "ellipse":
        cfg.loops = [("ellipse", values["ellipse_cx"] * b, values["ellipse_cy"] * b,
                      values["ellipse_l1"] * b, values["ellipse_l2"] * b)]
    elif cfg.scenario == "two_circles":
        cfg.loops = [
            ("circle", values["circle1_cx"] * b, values["circle1_cy"] * b,
             values["circle1_r"] * b),
            ("circle", values["circle2_cx"] * b, values["circle2_cy"] * b,
             values["circle2_r"] * b),
        ]
    else:
        if not cfg.field_path:
            raise ConfigError(
                f"line {lineno('scenario')}: scenario custom_field requires field_path")
        cfg.loops = []

    _check_clearance(cfg, lineno)

    if cfg.timeseries_every < 1:
        raise ConfigError(
            f"line {lineno('timeseries_every')}: timeseries_every must be >= 1")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigError(f"line {lineno('dt')}: dt must be positive")
    if cfg.t_end <= 0:
        raise ConfigError(f"line {lineno('t_end')}: t_end must be positive")
    return cfg


def _check_clearance(cfg: RunConfig, lineno) -> None:
    """Loop geometry must sit >= 10 eps inside the domain boundary."""
    margin = 10.0 * cfg.eps
    half_x = 0.5 * cfg.length_x - margin
    half_y = 0.5 * cfg.length_y - margin
    for loop in cfg.loops:
        if loop[0] == "circle":
            _, cx, cy, r = loop
            ex, ey = abs(cx) + r, abs(cy) + r
        else:
            _, cx, cy, a, bb = loop
            ex, ey = abs(cx) + a, abs(cy) + bb
        if ex > half_x or ey > half_y:
            ln = max(lineno("scenario"), lineno("eps"), lineno("eps_cells"))
            raise ConfigError(
                f"line {ln}: loop extends to ({ex:.3f}, {ey:.3f}) but must stay "
                f"10*eps = {margin:.3f} clear of the boundary "
                f"(limits {half_x:.3f}, {half_y:.3f})")


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_keys_help() -> str:
    """One line per recognized key, for the CLI help text."""
    lines = []
    for key, (_conv, default) in _KEYS.items():
        if key == "scenario":
            desc = "required: ellipse | two_circles | custom_field"
        elif default is None:
            desc = "default auto"
        else:
            desc = f"default {default}"
        lines.append(f"  {key:<18} {desc}")
    return "\n".join(lines)
