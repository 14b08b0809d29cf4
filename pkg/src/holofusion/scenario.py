"""Scenario configuration: a human-editable TOML tree with unit-suffixed keys,
plus the builder that turns a config into ready-to-use model objects.

The experiment setup mixes dB, dBm and wavelength units; every physical key
carries its unit in its name so a config file cannot be misread silently.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field as dc_field

import numpy as np

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 path
    import tomli as tomllib

from .channel import FeedGeometry, LinkParams, RhsGeometry, rhs_feed_channel, draw_channel
from .fusion import ObservationBound, TargetGrid
from .sensing import (
    SensingParams,
    SensorField,
    SurveillanceArea,
    expected_rho1,
    false_alarm_probs,
)

SCHEMA_VERSION = 1

CANONICAL_RULES = (
    "eFuC-0",
    "eFuC-1",
    "bFuC-0",
    "bFuC-1",
    "IS",
    "GLR",
    "GLR+IS-RHS",
    "GLR-obs-bound",
    "random-RHS-GLR",
)

_RULE_ALIASES = {r.lower().replace("+", "-"): r for r in CANONICAL_RULES}


class ConfigError(ValueError):
    """Config validation failure carrying the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def canonical_rule(name: str) -> str:
    key = str(name).lower().replace("+", "-")
    if key not in _RULE_ALIASES:
        raise ConfigError("eval.rules", f"unknown rule {name!r}; known: {', '.join(CANONICAL_RULES)}")
    return _RULE_ALIASES[key]


@dataclass(frozen=True)
class SensingSpec:
    snr_sen_db: float = 15.0
    eta_ref_wavelengths: float = 12.0
    alpha_exp: float = 4.0
    local_pfa: float = 0.05


@dataclass(frozen=True)
class WsnSpec:
    n_sensors: int = 15
    box_wavelengths: tuple = ((0.0, 40.0), (0.0, 40.0), (0.0, 3.0))
    noise_var: float = 1.0
    tx_gain: float = 1.0
    placement_seed: int = 7


@dataclass(frozen=True)
class AreaSpec:
    bounds_wavelengths: tuple = ((0.0, 40.0), (0.0, 40.0))
    grid_side: int = 5
    quad_side: int = 64


@dataclass(frozen=True)
class RhsSpec:
    side: int = 8
    spacing_wavelengths: float = 1.0 / 3.0
    center_wavelengths: tuple = (70.0, 20.0, 10.0)
    q_factor: float = 1.5
    efficiency: float = 1.0


@dataclass(frozen=True)
class FeedSpec:
    layout: tuple = (1, 1)
    spacing_wavelengths: float = 0.5
    center_wavelengths: tuple = (68.0, 18.0, 10.0)
    q_factor: float = 1.5


@dataclass(frozen=True)
class LinkSpec:
    mu_db: float = -30.0
    d0_wavelengths: float = 1.0
    nu_exp: float = 2.0
    rician_db_range: tuple = (3.0, 5.0)
    wavelength: float = 1.0


@dataclass(frozen=True)
class DesignSpec:
    tol: float = 1e-6
    max_iter: int = 200


@dataclass(frozen=True)
class EvalSpec:
    rules: tuple = ("eFuC-0", "eFuC-1", "bFuC-0", "bFuC-1", "IS", "GLR+IS-RHS", "GLR-obs-bound")
    n_channels: int = 100
    n_trials: int = 1000
    target_pfa: float = 0.01
    seed: int = 20250607


@dataclass(frozen=True)
class ScenarioConfig:
    sensing: SensingSpec = dc_field(default_factory=SensingSpec)
    wsn: WsnSpec = dc_field(default_factory=WsnSpec)
    area: AreaSpec = dc_field(default_factory=AreaSpec)
    rhs: RhsSpec = dc_field(default_factory=RhsSpec)
    feeds: FeedSpec = dc_field(default_factory=FeedSpec)
    link: LinkSpec = dc_field(default_factory=LinkSpec)
    noise_dbm: float = -50.0
    design: DesignSpec = dc_field(default_factory=DesignSpec)
    eval: EvalSpec = dc_field(default_factory=EvalSpec)

    def validate(self) -> "ScenarioConfig":
        s = self
        if s.wsn.n_sensors < 1:
            raise ConfigError("wsn.n_sensors", "must be >= 1")
        if len(s.wsn.box_wavelengths) != 3 or any(b[1] < b[0] for b in s.wsn.box_wavelengths):
            raise ConfigError("wsn.box_wavelengths", "need three (lo, hi) pairs with lo <= hi")
        if not s.wsn.noise_var > 0:
            raise ConfigError("wsn.noise_var", "must be > 0")
        if not s.wsn.tx_gain > 0:
            raise ConfigError("wsn.tx_gain", "must be > 0")
        if not 0.0 < s.sensing.local_pfa < 1.0:
            raise ConfigError("sensing.local_pfa", "must lie in (0, 1)")
        if not s.sensing.eta_ref_wavelengths > 0:
            raise ConfigError("sensing.eta_ref_wavelengths", "must be > 0")
        if not s.sensing.alpha_exp > 0:
            raise ConfigError("sensing.alpha_exp", "must be > 0")
        if s.area.grid_side < 1:
            raise ConfigError("area.grid_side", "must be >= 1")
        if s.area.quad_side < 8:
            raise ConfigError("area.quad_side", "must be >= 8")
        if any(b[1] <= b[0] for b in s.area.bounds_wavelengths):
            raise ConfigError("area.bounds_wavelengths", "need (lo, hi) pairs with lo < hi")
        if s.rhs.side < 1:
            raise ConfigError("rhs.side", "must be >= 1")
        if not s.rhs.spacing_wavelengths > 0:
            raise ConfigError("rhs.spacing_wavelengths", "must be > 0")
        if not 0.0 < s.rhs.efficiency <= 1.0:
            raise ConfigError("rhs.efficiency", "must lie in (0, 1]")
        if s.rhs.q_factor < 0:
            raise ConfigError("rhs.q_factor", "must be >= 0")
        if len(s.feeds.layout) != 2 or min(s.feeds.layout) < 1:
            raise ConfigError("feeds.layout", "need two positive integers (n_h, n_v)")
        if not s.link.d0_wavelengths > 0:
            raise ConfigError("link.d0_wavelengths", "must be > 0")
        if s.link.nu_exp < 0:
            raise ConfigError("link.nu_exp", "must be >= 0")
        if s.link.rician_db_range[0] > s.link.rician_db_range[1]:
            raise ConfigError("link.rician_db_range", "must satisfy lo <= hi")
        if not s.design.tol > 0:
            raise ConfigError("design.tol", "must be > 0")
        if s.design.max_iter < 1:
            raise ConfigError("design.max_iter", "must be >= 1")
        if s.eval.n_channels < 1:
            raise ConfigError("eval.n_channels", "must be >= 1")
        if s.eval.n_trials < 1:
            raise ConfigError("eval.n_trials", "must be >= 1")
        if not 0.0 < s.eval.target_pfa < 1.0:
            raise ConfigError("eval.target_pfa", "must lie in (0, 1)")
        if len(s.eval.rules) == 0:
            raise ConfigError("eval.rules", "must not be empty")
        for r in s.eval.rules:
            canonical_rule(r)
        return self

    def to_dict(self) -> dict:
        def listify(v):
            if isinstance(v, tuple):
                return [listify(x) for x in v]
            return v

        out = {"schema_version": SCHEMA_VERSION, "noise_dbm": self.noise_dbm}
        for name in ("sensing", "wsn", "area", "rhs", "feeds", "link", "design", "eval"):
            block = dataclasses.asdict(getattr(self, name))
            out[name] = {k: listify(getattr(getattr(self, name), k)) for k in block}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        def tupleize(v):
            if isinstance(v, list):
                return tuple(tupleize(x) for x in v)
            return v

        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"unsupported version {version}")
        blocks = {}
        specs = {
            "sensing": SensingSpec, "wsn": WsnSpec, "area": AreaSpec, "rhs": RhsSpec,
            "feeds": FeedSpec, "link": LinkSpec, "design": DesignSpec, "eval": EvalSpec,
        }
        for name, spec in specs.items():
            raw = data.get(name, {})
            if not isinstance(raw, dict):
                raise ConfigError(name, "must be a table")
            known = {f.name for f in dataclasses.fields(spec)}
            for key in raw:
                if key not in known:
                    raise ConfigError(f"{name}.{key}", "unknown key")
            kwargs = {k: tupleize(v) for k, v in raw.items()}
            try:
                blocks[name] = spec(**kwargs)
            except (TypeError, ValueError) as exc:
                raise ConfigError(name, str(exc)) from exc
        extra = set(data) - set(specs) - {"schema_version", "noise_dbm"}
        if extra:
            raise ConfigError(sorted(extra)[0], "unknown key")
        cfg = cls(noise_dbm=float(data.get("noise_dbm", -50.0)), **blocks)
        return cfg.validate()

    def replace(self, **block_updates) -> "ScenarioConfig":
        """Rebuild with some blocks (or block fields via dicts) replaced."""
        updates = {}
        for key, val in block_updates.items():
            if isinstance(val, dict):
                updates[key] = dataclasses.replace(getattr(self, key), **val)
            else:
                updates[key] = val
        return dataclasses.replace(self, **updates).validate()


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)!r} to TOML")


def dumps_toml(tree: dict) -> str:
    """Serialize a {scalars + tables-of-scalars} tree; enough for configs."""
    lines = []
    for key, val in tree.items():
        if not isinstance(val, dict):
            lines.append(f"{key} = {_toml_value(val)}")
    for key, val in tree.items():
        if isinstance(val, dict):
            lines.append("")
            lines.append(f"[{key}]")
            for k, v in val.items():
                lines.append(f"{k} = {_toml_value(v)}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_toml(cfg.to_dict()))


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(path), f"TOML parse error: {exc}") from exc
    return ScenarioConfig.from_dict(data)


def paper_profile() -> ScenarioConfig:
    """Full-scale defaults: K=15 sensors, 64-element surface, one feed,
    5x5 target grid, 100 channels x 1000 trials."""
    return ScenarioConfig().validate()


def desk_profile() -> ScenarioConfig:
    """CI-sized defaults: K=10, 16-element surface, 3x3 grid, 20 channels
    x 400 trials. Physical constants match the full-scale profile except the
    receiver noise floor, lowered 6 dB to partially offset the coherent-gain
    loss of the smaller aperture and keep the operating point mid-ROC."""
    return ScenarioConfig(
        wsn=WsnSpec(n_sensors=10),
        area=AreaSpec(grid_side=3),
        rhs=RhsSpec(side=4),
        noise_dbm=-56.0,
        eval=EvalSpec(
            rules=("eFuC-0", "eFuC-1", "bFuC-0", "bFuC-1", "IS", "GLR+IS-RHS", "GLR-obs-bound"),
            n_channels=20,
            n_trials=400,
            target_pfa=0.01,
            seed=20250607,
        ),
    ).validate()


PROFILES = {"desk": desk_profile, "paper": paper_profile}


@dataclass(frozen=True)
class ScenarioContext:
    """Constructed model objects for one scenario, shared by all channels."""

    config: ScenarioConfig
    params: SensingParams
    field: SensorField
    area: SurveillanceArea
    rhs: RhsGeometry
    feeds: FeedGeometry
    link: LinkParams
    sigma_w2: float
    G: np.ndarray
    grid: TargetGrid
    rho0: np.ndarray
    rho_bar: np.ndarray
    obs_bound: ObservationBound

    def draw_channel(self, rng):
        return draw_channel(self.field.positions, self.rhs, self.feeds, self.link, rng, G=self.G)


def build_context(cfg: ScenarioConfig) -> ScenarioContext:
    """Materialize a validated config: place sensors, derive thresholds,
    compute the deterministic feed matrix and the target-grid statistics."""
    cfg.validate()
    theta_power = cfg.wsn.noise_var * 10.0 ** (cfg.sensing.snr_sen_db / 10.0)
    params = SensingParams(
        theta_power=theta_power,
        eta_ref=cfg.sensing.eta_ref_wavelengths,
        alpha_exp=cfg.sensing.alpha_exp,
        local_pfa=cfg.sensing.local_pfa,
    )
    place_rng = np.random.default_rng(np.random.SeedSequence([cfg.wsn.placement_seed]))
    box = np.asarray(cfg.wsn.box_wavelengths, dtype=float)
    unit = place_rng.uniform(size=(cfg.wsn.n_sensors, 3))
    positions = box[:, 0] + unit * (box[:, 1] - box[:, 0])
    k = cfg.wsn.n_sensors
    field = SensorField.with_common_pfa(
        positions, cfg.wsn.noise_var * np.ones(k), cfg.wsn.tx_gain * np.ones(k),
        cfg.sensing.local_pfa,
    )
    area = SurveillanceArea(
        bounds=cfg.area.bounds_wavelengths, grid_side=cfg.area.grid_side,
        quad_side=cfg.area.quad_side,
    )
    rhs = RhsGeometry.square(
        cfg.rhs.side, cfg.rhs.spacing_wavelengths, np.asarray(cfg.rhs.center_wavelengths),
        q_factor=cfg.rhs.q_factor, efficiency=cfg.rhs.efficiency,
    )
    feeds = FeedGeometry.grid(
        cfg.feeds.layout, cfg.feeds.spacing_wavelengths,
        np.asarray(cfg.feeds.center_wavelengths), q_factor=cfg.feeds.q_factor,
    )
    link = LinkParams(
        mu_ref=10.0 ** (cfg.link.mu_db / 10.0),
        d0=cfg.link.d0_wavelengths,
        nu=cfg.link.nu_exp,
        rician_db_range=cfg.link.rician_db_range,
        wavelength=cfg.link.wavelength,
    )
    sigma_w2 = 10.0 ** (cfg.noise_dbm / 10.0)
    G = rhs_feed_channel(rhs, feeds, wavelength=cfg.link.wavelength)
    grid = TargetGrid(area.target_grid())
    return ScenarioContext(
        config=cfg,
        params=params,
        field=field,
        area=area,
        rhs=rhs,
        feeds=feeds,
        link=link,
        sigma_w2=sigma_w2,
        G=G,
        grid=grid,
        rho0=false_alarm_probs(field),
        rho_bar=expected_rho1(field, params, area),
        obs_bound=ObservationBound(grid, field, params),
    )
