"""Scenario configuration: device parameters, house and community layout,
validation, defaults, and YAML round-tripping.

A scenario is the full description of one episode: the houses with their
equipment, the grid connection mode, which bundled controller (if any)
drives the community, the step size and horizon, and where the weather and
load disturbances come from.
"""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

import yaml

__all__ = [
    "ScenarioError",
    "DerClass",
    "GridMode",
    "ControllerKind",
    "StartupMode",
    "ThermalParams",
    "PvParams",
    "BatteryParams",
    "ThermostatParams",
    "StartupParams",
    "SynthSpec",
    "SyntheticSource",
    "FileSource",
    "HouseConfig",
    "ScenarioConfig",
    "DefaultParameters",
    "default_parameters",
    "make_house",
    "community_scenario",
    "single_house_scenario",
    "load_scenario",
    "save_scenario",
    "scenario_digest",
]

N_PRIORITIES = 8


class ScenarioError(ValueError):
    """Raised when a scenario file cannot be parsed or fails validation."""


class DerClass(enum.Enum):
    PV_AND_BATTERY = "pv_and_battery"
    BATTERY_ONLY = "battery_only"
    PV_ONLY = "pv_only"
    NO_DER = "no_der"

    @property
    def has_pv(self) -> bool:
        return self in (DerClass.PV_AND_BATTERY, DerClass.PV_ONLY)

    @property
    def has_battery(self) -> bool:
        return self in (DerClass.PV_AND_BATTERY, DerClass.BATTERY_ONLY)


class GridMode(enum.Enum):
    OFF_GRID = "off_grid"
    ON_GRID = "on_grid"


class ControllerKind(enum.Enum):
    BASELINE = "baseline"
    RULE_BASED = "rulebased"
    EXTERNAL = "external"


class StartupMode(enum.Enum):
    """Whether feasibility checks include compressor inrush power.

    WACSC: with AC start-up constraint (surge power must be covered).
    WOACSC: without it (only step energy must balance).
    """

    WACSC = "wacsc"
    WOACSC = "woacsc"


@dataclass(frozen=True)
class ThermalParams:
    """First-order house thermal response.

    a is the per-step retention factor, d the ambient coupling; an AC moves
    cop * p_ac_rated degrees-equivalent per step when running.
    """

    a: float
    d: float
    cop: float
    p_ac_rated: float  # kW

    def validate(self, prefix: str = "thermal") -> None:
        if not 0.0 < self.a < 1.0:
            raise ScenarioError(f"{prefix}.a must lie in (0, 1), got {self.a}")
        if not 0.0 < self.d < 1.0:
            raise ScenarioError(f"{prefix}.d must lie in (0, 1), got {self.d}")
        if self.cop <= 0.0:
            raise ScenarioError(f"{prefix}.cop must be positive, got {self.cop}")
        if self.p_ac_rated <= 0.0:
            raise ScenarioError(
                f"{prefix}.p_ac_rated must be positive, got {self.p_ac_rated}"
            )


@dataclass(frozen=True)
class PvParams:
    """Flat-plate array: rated panels derated linearly with module temperature.

    Module temperature follows the Faiman form t_am + ghi / (u0 + u1 * wind).
    faiman_additive_wind switches to the variant where wind enters the loss
    divisor additively, t_am + ghi / (u0 + u1 + wind).
    """

    n_panels: int
    p_panel_rated: float  # kW per panel
    gamma_pct_per_degc: float = -0.35
    g_std: float = 1000.0  # W/m^2
    t_std: float = 25.0  # degC
    u0: float = 25.0  # W/m^2/K
    u1: float = 6.84  # W*s/m^3/K
    faiman_additive_wind: bool = False

    def validate(self, prefix: str = "pv") -> None:
        if self.n_panels < 0:
            raise ScenarioError(f"{prefix}.n_panels must be >= 0, got {self.n_panels}")
        if self.p_panel_rated <= 0.0:
            raise ScenarioError(
                f"{prefix}.p_panel_rated must be positive, got {self.p_panel_rated}"
            )
        if self.g_std <= 0.0:
            raise ScenarioError(f"{prefix}.g_std must be positive, got {self.g_std}")
        if self.u0 <= 0.0:
            raise ScenarioError(f"{prefix}.u0 must be positive, got {self.u0}")
        if self.u1 < 0.0:
            raise ScenarioError(f"{prefix}.u1 must be >= 0, got {self.u1}")


@dataclass(frozen=True)
class BatteryParams:
    """Energy-bucket battery with one-way efficiencies and per-step caps."""

    e_max: float  # kWh usable ceiling
    e_min: float  # kWh floor
    e_charge_cap: float  # kWh per step into the cells
    e_discharge_cap: float  # kWh per step out of the cells
    eta_c: float = 0.95
    eta_d: float = 0.95

    def validate(self, prefix: str = "battery") -> None:
        if not self.e_min < self.e_max:
            raise ScenarioError(
                f"{prefix}: e_min < e_max violated ({self.e_min} >= {self.e_max})"
            )
        if self.e_min < 0.0:
            raise ScenarioError(f"{prefix}.e_min must be >= 0, got {self.e_min}")
        if self.e_charge_cap <= 0.0:
            raise ScenarioError(
                f"{prefix}.e_charge_cap must be positive, got {self.e_charge_cap}"
            )
        if self.e_discharge_cap <= 0.0:
            raise ScenarioError(
                f"{prefix}.e_discharge_cap must be positive, got {self.e_discharge_cap}"
            )
        for name, eta in (("eta_c", self.eta_c), ("eta_d", self.eta_d)):
            if not 0.0 < eta <= 1.0:
                raise ScenarioError(f"{prefix}.{name} must lie in (0, 1], got {eta}")


@dataclass(frozen=True)
class ThermostatParams:
    """Hysteresis bands for the bundled controllers.

    (t_ac_low, t_ac_high) is the AC on/off band, (t_mode_low, t_mode_high)
    the outer band that flips between heating and cooling. mode_select_inverted
    reproduces a published variant in which the low outer bound selects
    cooling and the high one heating.
    """

    t_ac_low: float = 23.0
    t_ac_high: float = 25.0
    t_mode_low: float = 18.0
    t_mode_high: float = 30.0
    mode_select_inverted: bool = False

    def validate(self, prefix: str = "thermostat") -> None:
        if not self.t_ac_low < self.t_ac_high:
            raise ScenarioError(
                f"{prefix}: t_ac_low < t_ac_high violated "
                f"({self.t_ac_low} >= {self.t_ac_high})"
            )
        if not self.t_mode_low < self.t_mode_high:
            raise ScenarioError(
                f"{prefix}: t_mode_low < t_mode_high violated "
                f"({self.t_mode_low} >= {self.t_mode_high})"
            )
        if not (self.t_mode_low <= self.t_ac_low and self.t_ac_high <= self.t_mode_high):
            raise ScenarioError(
                f"{prefix}: AC band must sit inside the mode band "
                f"([{self.t_ac_low}, {self.t_ac_high}] vs "
                f"[{self.t_mode_low}, {self.t_mode_high}])"
            )


@dataclass(frozen=True)
class StartupParams:
    """Compressor inrush: surge power is (1 - alpha_v) * alpha_i * p_ac_rated."""

    alpha_v: float = 0.3
    alpha_i: float = 5.0

    def validate(self, prefix: str = "startup") -> None:
        if not 0.0 <= self.alpha_v < 1.0:
            raise ScenarioError(
                f"{prefix}.alpha_v must lie in [0, 1), got {self.alpha_v}"
            )
        # typical compressor inrush multipliers; outside this range the
        # surge model is not credible
        if not 3.0 <= self.alpha_i <= 8.0:
            raise ScenarioError(
                f"{prefix}.alpha_i must lie in [3, 8], got {self.alpha_i}"
            )

    def surge_kw(self, p_ac_rated: float) -> float:
        return (1.0 - self.alpha_v) * self.alpha_i * p_ac_rated


@dataclass(frozen=True)
class SynthSpec:
    """Knobs for the seeded synthetic disturbance generator."""

    days: int = 7
    peak_ghi_wm2: float = 800.0
    t_min_c: float = 24.0
    t_max_c: float = 35.0
    wind_mean_ms: float = 2.0
    # mean kW per priority group, fridge-like P1 down to discretionary P8
    load_means_kw: tuple[float, ...] = (
        0.15, 0.10, 0.12, 0.08, 0.20, 0.15, 0.25, 0.30,
    )

    def validate(self, prefix: str = "synth") -> None:
        if self.days <= 0:
            raise ScenarioError(f"{prefix}.days must be positive, got {self.days}")
        if self.peak_ghi_wm2 < 0.0:
            raise ScenarioError(
                f"{prefix}.peak_ghi_wm2 must be >= 0, got {self.peak_ghi_wm2}"
            )
        if self.t_min_c > self.t_max_c:
            raise ScenarioError(
                f"{prefix}: t_min_c <= t_max_c violated "
                f"({self.t_min_c} > {self.t_max_c})"
            )
        if self.wind_mean_ms < 0.0:
            raise ScenarioError(
                f"{prefix}.wind_mean_ms must be >= 0, got {self.wind_mean_ms}"
            )
        if len(self.load_means_kw) != N_PRIORITIES:
            raise ScenarioError(
                f"{prefix}.load_means_kw must have {N_PRIORITIES} entries, "
                f"got {len(self.load_means_kw)}"
            )
        if any(m < 0.0 for m in self.load_means_kw):
            raise ScenarioError(f"{prefix}.load_means_kw entries must be >= 0")


@dataclass(frozen=True)
class SyntheticSource:
    """Disturbances drawn from the seeded generator at reset time."""

    spec: SynthSpec = field(default_factory=SynthSpec)
    seed: Optional[int] = None


@dataclass(frozen=True)
class FileSource:
    """Disturbances read from CSV files.

    load_paths holds either one file shared by every house or one per house.
    """

    weather_path: str
    load_paths: tuple[str, ...]
    circuit_map_path: Optional[str] = None
    allow_upsample: bool = False


DisturbanceSource = Union[SyntheticSource, FileSource]


@dataclass(frozen=True)
class HouseConfig:
    house_id: int
    der: DerClass
    thermal: ThermalParams
    thermostat: ThermostatParams
    pv: Optional[PvParams] = None
    battery: Optional[BatteryParams] = None
    initial_t_house: float = 24.0
    initial_e_bat: Optional[float] = None  # None -> midpoint of the envelope
    initial_u_mode: int = -1  # thermostat mode held from before the episode

    @property
    def has_pv(self) -> bool:
        return self.der.has_pv

    @property
    def has_battery(self) -> bool:
        return self.der.has_battery

    def start_e_bat(self) -> float:
        if not self.has_battery:
            return 0.0
        assert self.battery is not None
        if self.initial_e_bat is None:
            return 0.5 * (self.battery.e_min + self.battery.e_max)
        return self.initial_e_bat

    def validate(self) -> None:
        prefix = f"houses[{self.house_id}]"
        if self.house_id < 0:
            raise ScenarioError(f"{prefix}.house_id must be >= 0")
        if self.initial_u_mode not in (-1, 1):
            raise ScenarioError(
                f"{prefix}.initial_u_mode must be -1 or +1, got {self.initial_u_mode}"
            )
        self.thermal.validate(f"{prefix}.thermal")
        self.thermostat.validate(f"{prefix}.thermostat")
        if self.has_pv:
            if self.pv is None:
                raise ScenarioError(f"{prefix}.pv required for der={self.der.value}")
            self.pv.validate(f"{prefix}.pv")
        elif self.pv is not None:
            raise ScenarioError(f"{prefix}.pv must be absent for der={self.der.value}")
        if self.has_battery:
            if self.battery is None:
                raise ScenarioError(
                    f"{prefix}.battery required for der={self.der.value}"
                )
            self.battery.validate(f"{prefix}.battery")
            if self.initial_e_bat is not None and not (
                self.battery.e_min <= self.initial_e_bat <= self.battery.e_max
            ):
                raise ScenarioError(
                    f"{prefix}.initial_e_bat outside [e_min, e_max]: "
                    f"{self.initial_e_bat}"
                )
        elif self.battery is not None:
            raise ScenarioError(
                f"{prefix}.battery must be absent for der={self.der.value}"
            )


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    houses: tuple[HouseConfig, ...]
    grid_mode: GridMode
    controller: ControllerKind
    startup_mode: StartupMode
    startup: StartupParams
    disturbances: DisturbanceSource
    dt_hours: float = 1.0 / 6.0
    horizon_steps: int = 1008

    @property
    def n_houses(self) -> int:
        return len(self.houses)

    def validate(self) -> None:
        if not self.name:
            raise ScenarioError("name must be non-empty")
        if not self.houses:
            raise ScenarioError("houses must be non-empty")
        if self.dt_hours <= 0.0:
            raise ScenarioError(f"dt_hours must be positive, got {self.dt_hours}")
        if self.horizon_steps <= 0:
            raise ScenarioError(
                f"horizon_steps must be positive, got {self.horizon_steps}"
            )
        ids = [h.house_id for h in self.houses]
        if ids != sorted(set(ids)):
            raise ScenarioError(
                f"houses must have unique ascending house_id values, got {ids}"
            )
        for h in self.houses:
            h.validate()
        self.startup.validate()
        if (
            self.controller is ControllerKind.RULE_BASED
            and self.grid_mode is GridMode.ON_GRID
        ):
            raise ScenarioError(
                "controller=rulebased requires grid_mode=off_grid; "
                "the rule-based policy only arbitrates islanded scarcity"
            )
        if isinstance(self.disturbances, SyntheticSource):
            self.disturbances.spec.validate()
        elif isinstance(self.disturbances, FileSource):
            n_load = len(self.disturbances.load_paths)
            if n_load not in (1, self.n_houses):
                raise ScenarioError(
                    f"disturbances.load_paths must have 1 or {self.n_houses} "
                    f"entries, got {n_load}"
                )
        else:
            raise ScenarioError(
                f"disturbances must be synthetic or file-based, "
                f"got {type(self.disturbances).__name__}"
            )


@dataclass(frozen=True)
class DefaultParameters:
    """Reference equipment bundle shared by the stock scenarios."""

    dt_hours: float
    thermal: ThermalParams
    pv: PvParams
    battery: BatteryParams
    thermostat: ThermostatParams
    startup: StartupParams


def default_parameters(dt_hours: float = 1.0 / 6.0) -> DefaultParameters:
    """Stock parameter set: 10 kW-class PV, 13.5 kWh battery, 3 kW AC.

    The thermal retention factor follows a 3 h relaxation time at the given
    step, a = exp(-dt / 3), d = 1 - a.
    """
    if dt_hours <= 0.0:
        raise ScenarioError(f"dt_hours must be positive, got {dt_hours}")
    a = math.exp(-dt_hours / 3.0)
    return DefaultParameters(
        dt_hours=dt_hours,
        thermal=ThermalParams(a=a, d=1.0 - a, cop=3.0, p_ac_rated=3.0),
        pv=PvParams(n_panels=31, p_panel_rated=0.325),
        battery=BatteryParams(
            e_max=13.5,
            e_min=0.0,
            e_charge_cap=5.0 * dt_hours,
            e_discharge_cap=7.0 * dt_hours,
        ),
        thermostat=ThermostatParams(),
        startup=StartupParams(),
    )


def make_house(
    house_id: int,
    der: DerClass,
    params: Optional[DefaultParameters] = None,
    *,
    n_panels: Optional[int] = None,
    initial_t_house: float = 24.0,
    initial_e_bat: Optional[float] = None,
) -> HouseConfig:
    """Build a house from the stock bundle, keeping only the gear its DER
    class carries."""
    p = params if params is not None else default_parameters()
    pv = None
    if der.has_pv:
        pv = p.pv if n_panels is None else replace(p.pv, n_panels=n_panels)
    battery = p.battery if der.has_battery else None
    return HouseConfig(
        house_id=house_id,
        der=der,
        thermal=p.thermal,
        thermostat=p.thermostat,
        pv=pv,
        battery=battery,
        initial_t_house=initial_t_house,
        initial_e_bat=initial_e_bat,
    )


_COMMUNITY_DERS = (
    DerClass.PV_AND_BATTERY,
    DerClass.BATTERY_ONLY,
    DerClass.PV_ONLY,
    DerClass.NO_DER,
)


def community_scenario(
    name: str = "community",
    *,
    grid_mode: GridMode = GridMode.OFF_GRID,
    controller: ControllerKind = ControllerKind.BASELINE,
    startup_mode: StartupMode = StartupMode.WACSC,
    disturbances: Optional[DisturbanceSource] = None,
    params: Optional[DefaultParameters] = None,
    horizon_steps: int = 1008,
) -> ScenarioConfig:
    """Four-house reference community: one house per DER class."""
    p = params if params is not None else default_parameters()
    houses = tuple(
        make_house(i, der, p) for i, der in enumerate(_COMMUNITY_DERS)
    )
    dist = disturbances if disturbances is not None else SyntheticSource(seed=0)
    cfg = ScenarioConfig(
        name=name,
        houses=houses,
        grid_mode=grid_mode,
        controller=controller,
        startup_mode=startup_mode,
        startup=p.startup,
        disturbances=dist,
        dt_hours=p.dt_hours,
        horizon_steps=horizon_steps,
    )
    cfg.validate()
    return cfg


def single_house_scenario(
    der: DerClass,
    name: Optional[str] = None,
    *,
    grid_mode: GridMode = GridMode.OFF_GRID,
    controller: ControllerKind = ControllerKind.BASELINE,
    startup_mode: StartupMode = StartupMode.WACSC,
    disturbances: Optional[DisturbanceSource] = None,
    params: Optional[DefaultParameters] = None,
    horizon_steps: int = 1008,
    n_panels: Optional[int] = None,
) -> ScenarioConfig:
    p = params if params is not None else default_parameters()
    dist = disturbances if disturbances is not None else SyntheticSource(seed=0)
    cfg = ScenarioConfig(
        name=name or f"single_{der.value}",
        houses=(make_house(0, der, p, n_panels=n_panels),),
        grid_mode=grid_mode,
        controller=controller,
        startup_mode=startup_mode,
        startup=p.startup,
        disturbances=dist,
        dt_hours=p.dt_hours,
        horizon_steps=horizon_steps,
    )
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# YAML round-trip


def _params_to_dict(obj) -> dict:
    out = {}
    for k, v in vars(obj).items():
        if isinstance(v, enum.Enum):
            out[k] = v.value
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = v
    return out


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    houses = []
    for h in cfg.houses:
        d = {
            "house_id": h.house_id,
            "der": h.der.value,
            "thermal": _params_to_dict(h.thermal),
            "thermostat": _params_to_dict(h.thermostat),
            "initial_t_house": h.initial_t_house,
            "initial_u_mode": h.initial_u_mode,
        }
        if h.pv is not None:
            d["pv"] = _params_to_dict(h.pv)
        if h.battery is not None:
            d["battery"] = _params_to_dict(h.battery)
        if h.initial_e_bat is not None:
            d["initial_e_bat"] = h.initial_e_bat
        houses.append(d)
    if isinstance(cfg.disturbances, SyntheticSource):
        dist = {
            "kind": "synthetic",
            "spec": _params_to_dict(cfg.disturbances.spec),
        }
        if cfg.disturbances.seed is not None:
            dist["seed"] = cfg.disturbances.seed
    else:
        dist = {
            "kind": "files",
            "weather_path": cfg.disturbances.weather_path,
            "load_paths": list(cfg.disturbances.load_paths),
            "allow_upsample": cfg.disturbances.allow_upsample,
        }
        if cfg.disturbances.circuit_map_path is not None:
            dist["circuit_map_path"] = cfg.disturbances.circuit_map_path
    return {
        "name": cfg.name,
        "grid_mode": cfg.grid_mode.value,
        "controller": cfg.controller.value,
        "startup_mode": cfg.startup_mode.value,
        "startup": _params_to_dict(cfg.startup),
        "dt_hours": cfg.dt_hours,
        "horizon_steps": cfg.horizon_steps,
        "houses": houses,
        "disturbances": dist,
    }


def _build_params(cls, raw, prefix: str):
    if not isinstance(raw, dict):
        raise ScenarioError(f"{prefix} must be a mapping, got {type(raw).__name__}")
    fields = {f for f in cls.__dataclass_fields__}
    unknown = set(raw) - fields
    if unknown:
        raise ScenarioError(f"{prefix}: unknown fields {sorted(unknown)}")
    kwargs = dict(raw)
    for k, v in kwargs.items():
        if isinstance(v, list):
            kwargs[k] = tuple(v)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ScenarioError(f"{prefix}: {exc}") from exc


def _enum_value(cls, raw, field_name: str):
    try:
        return cls(raw)
    except ValueError:
        valid = ", ".join(m.value for m in cls)
        raise ScenarioError(
            f"{field_name} must be one of ({valid}), got {raw!r}"
        ) from None


def scenario_from_dict(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a mapping")
    required = {"name", "grid_mode", "controller", "houses", "disturbances"}
    missing = required - set(data)
    if missing:
        raise ScenarioError(f"missing required fields: {sorted(missing)}")

    houses = []
    raw_houses = data["houses"]
    if not isinstance(raw_houses, list):
        raise ScenarioError("houses must be a list")
    for i, raw in enumerate(raw_houses):
        if not isinstance(raw, dict):
            raise ScenarioError(f"houses[{i}] must be a mapping")
        prefix = f"houses[{i}]"
        try:
            der = _enum_value(DerClass, raw.get("der"), f"{prefix}.der")
            house = HouseConfig(
                house_id=int(raw.get("house_id", i)),
                der=der,
                thermal=_build_params(
                    ThermalParams, raw.get("thermal"), f"{prefix}.thermal"
                ),
                thermostat=_build_params(
                    ThermostatParams,
                    raw.get("thermostat", {}),
                    f"{prefix}.thermostat",
                ),
                pv=(
                    _build_params(PvParams, raw["pv"], f"{prefix}.pv")
                    if "pv" in raw
                    else None
                ),
                battery=(
                    _build_params(BatteryParams, raw["battery"], f"{prefix}.battery")
                    if "battery" in raw
                    else None
                ),
                initial_t_house=float(raw.get("initial_t_house", 24.0)),
                initial_e_bat=(
                    float(raw["initial_e_bat"]) if "initial_e_bat" in raw else None
                ),
                initial_u_mode=int(raw.get("initial_u_mode", -1)),
            )
        except (ValueError, KeyError) as exc:
            if isinstance(exc, ScenarioError):
                raise
            raise ScenarioError(f"{prefix}: {exc}") from exc
        houses.append(house)

    raw_dist = data["disturbances"]
    if not isinstance(raw_dist, dict) or "kind" not in raw_dist:
        raise ScenarioError("disturbances must be a mapping with a 'kind' field")
    kind = raw_dist["kind"]
    disturbances: DisturbanceSource
    if kind == "synthetic":
        spec = (
            _build_params(SynthSpec, raw_dist["spec"], "disturbances.spec")
            if "spec" in raw_dist
            else SynthSpec()
        )
        seed = raw_dist.get("seed")
        disturbances = SyntheticSource(
            spec=spec, seed=None if seed is None else int(seed)
        )
    elif kind == "files":
        if "weather_path" not in raw_dist or "load_paths" not in raw_dist:
            raise ScenarioError(
                "disturbances kind=files requires weather_path and load_paths"
            )
        disturbances = FileSource(
            weather_path=str(raw_dist["weather_path"]),
            load_paths=tuple(str(p) for p in raw_dist["load_paths"]),
            circuit_map_path=(
                str(raw_dist["circuit_map_path"])
                if raw_dist.get("circuit_map_path") is not None
                else None
            ),
            allow_upsample=bool(raw_dist.get("allow_upsample", False)),
        )
    else:
        raise ScenarioError(
            f"disturbances.kind must be 'synthetic' or 'files', got {kind!r}"
        )

    cfg = ScenarioConfig(
        name=str(data["name"]),
        houses=tuple(houses),
        grid_mode=_enum_value(GridMode, data["grid_mode"], "grid_mode"),
        controller=_enum_value(ControllerKind, data["controller"], "controller"),
        startup_mode=_enum_value(
            StartupMode, data.get("startup_mode", "wacsc"), "startup_mode"
        ),
        startup=_build_params(StartupParams, data.get("startup", {}), "startup"),
        disturbances=disturbances,
        dt_hours=float(data.get("dt_hours", 1.0 / 6.0)),
        horizon_steps=int(data.get("horizon_steps", 1008)),
    )
    cfg.validate()
    return cfg


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario parse error in {path}: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(cfg: ScenarioConfig, path: str | Path) -> None:
    cfg.validate()
    Path(path).write_text(
        yaml.safe_dump(scenario_to_dict(cfg), sort_keys=True, default_flow_style=False)
    )


def scenario_digest(cfg: ScenarioConfig) -> str:
    """Stable content hash used to tag run outputs."""
    canonical = yaml.safe_dump(scenario_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
