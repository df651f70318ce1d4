"""Step/reset simulation engine.

One Engine instance owns the mutable episode state (house temperatures,
battery charge, previous switch positions) and advances it one step at a
time. Each step evaluates the commanded actions into candidate energies,
decides whether an islanded community can carry them (serve all or serve
nothing), trims any surplus an island cannot export, commits device states,
and emits a StepRecord.

Actions come either from the bundled controller named in the scenario or
from the caller; an explicit actions argument always wins.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import controllers as ctl
from .controllers import ActionVector, ControllerInput, HouseView
from .data import LoadSeries, WeatherSeries, load_loads_csv, load_weather_csv
from .data import CircuitMapping, default_circuit_mapping, synth_disturbances
from .devices import DeviceEnergies, battery_step, house_energies, pv_potential, thermal_step
from .grid import (
    CommunityBalance,
    FeasibilityOutcome,
    Reason,
    Verdict,
    community_balance,
    resolve_step,
    shave_offgrid_surplus,
    startup_flags,
    startup_mismatch,
)
from .scenario import (
    ControllerKind,
    FileSource,
    GridMode,
    N_PRIORITIES,
    ScenarioConfig,
    StartupMode,
    SyntheticSource,
    scenario_digest,
)

__all__ = [
    "EngineError",
    "StepRecord",
    "Trace",
    "Engine",
    "run_episode",
    "observation_schema",
    "action_schema",
    "ObsSlot",
    "ActionField",
    "default_reward",
    "OBS_HEADER_SLOTS",
    "OBS_SLOTS_PER_HOUSE",
]

OBS_HEADER_SLOTS = 6
OBS_SLOTS_PER_HOUSE = 3 + N_PRIORITIES


class EngineError(RuntimeError):
    """Protocol misuse: stepping a finished or un-reset engine, or
    disturbances that cannot cover the horizon."""


@dataclass(frozen=True)
class StepRecord:
    """Everything realized during one step."""

    step: int
    ghi_wm2: float
    t_ambient_c: float
    wind_ms: float
    desired: tuple[tuple[float, ...], ...]
    commanded: tuple[ActionVector, ...]
    realized: tuple[ActionVector, ...]
    energies: tuple[DeviceEnergies, ...]
    e_gen: float
    e_dem: float
    e_mis: float
    e_grid: float
    candidate_e_mis: float
    candidate_p_mis_ac: float
    attempted_startups: tuple[int, ...]
    verdict: Verdict
    reason: Reason
    t_house: tuple[float, ...]
    e_bat: tuple[float, ...]
    comfort_violation_degc: tuple[float, ...]

    @property
    def served(self) -> bool:
        return self.verdict is Verdict.SERVE_ALL

    @property
    def desired_total(self) -> float:
        return math.fsum(math.fsum(row) for row in self.desired)

    @property
    def served_total(self) -> float:
        return math.fsum(e.e_load_total for e in self.energies)


@dataclass
class Trace:
    """A finished (or partial) episode with optional step timings."""

    scenario: ScenarioConfig
    digest: str
    seed: Optional[int]
    records: list[StepRecord]
    step_ms: Optional[list[float]] = None

    @property
    def dt_hours(self) -> float:
        return self.scenario.dt_hours

    @property
    def n_houses(self) -> int:
        return self.scenario.n_houses

    def house_bands(self) -> tuple[tuple[float, float], ...]:
        return tuple(
            (h.thermostat.t_mode_low, h.thermostat.t_mode_high)
            for h in self.scenario.houses
        )


@dataclass(frozen=True)
class ObsSlot:
    index: int
    name: str
    low: float
    high: float


@dataclass(frozen=True)
class ActionField:
    """One command field of one house, with DER gating."""

    house_id: int
    field: str  # u_ac | u_mode | u_pv | c | d | u_loads
    kind: str  # binary | sign | unit | binary_vector
    size: int
    enabled: bool


def observation_schema(scenario: ScenarioConfig) -> list[ObsSlot]:
    """Flat observation layout: six header slots, then eleven per house."""
    inf = math.inf
    slots = [
        ObsSlot(0, "step_index", 0.0, float(scenario.horizon_steps)),
        ObsSlot(1, "day_fraction", 0.0, 1.0),
        ObsSlot(2, "ghi_wm2", 0.0, inf),
        ObsSlot(3, "t_ambient_c", -inf, inf),
        ObsSlot(4, "wind_ms", 0.0, inf),
        ObsSlot(5, "prev_e_grid_kwh", -inf, inf),
    ]
    i = OBS_HEADER_SLOTS
    for h in scenario.houses:
        hid = h.house_id
        slots.append(ObsSlot(i, f"house{hid}.t_house_c", -inf, inf))
        if h.has_battery:
            assert h.battery is not None
            lo, hi = h.battery.e_min, h.battery.e_max
        else:
            lo = hi = 0.0
        slots.append(ObsSlot(i + 1, f"house{hid}.e_bat_kwh", lo, hi))
        slots.append(ObsSlot(i + 2, f"house{hid}.pv_potential_kwh", 0.0, inf))
        for j in range(N_PRIORITIES):
            slots.append(
                ObsSlot(i + 3 + j, f"house{hid}.desired_p{j + 1}_kwh", 0.0, inf)
            )
        i += OBS_SLOTS_PER_HOUSE
    return slots


def action_schema(scenario: ScenarioConfig) -> list[ActionField]:
    """Per-house command fields; disabled fields must be held at zero."""
    fields = []
    for h in scenario.houses:
        hid = h.house_id
        fields.append(ActionField(hid, "u_ac", "binary", 1, True))
        fields.append(ActionField(hid, "u_mode", "sign", 1, True))
        fields.append(ActionField(hid, "u_pv", "unit", 1, h.has_pv))
        fields.append(ActionField(hid, "c", "unit", 1, h.has_battery))
        fields.append(ActionField(hid, "d", "unit", 1, h.has_battery))
        fields.append(ActionField(hid, "u_loads", "binary_vector", N_PRIORITIES, True))
    return fields


def default_reward(record: StepRecord) -> float:
    """Unserved load, discomfort, and grid import folded into one scalar.

    reward = -(unserved kWh)
             - 0.1 * mean per-house comfort-band violation (degC)
             - 0.01 * grid import (kWh)
    """
    unserved = record.desired_total - record.served_total
    comfort = math.fsum(record.comfort_violation_degc) / len(
        record.comfort_violation_degc
    )
    grid_import = max(0.0, -record.e_grid)
    return -unserved - 0.1 * comfort - 0.01 * grid_import


_ZERO_LOADS = tuple([0.0] * N_PRIORITIES)
_LOADS_OFF = tuple([0] * N_PRIORITIES)


class Engine:
    """Owns one episode's state and advances it step by step."""

    def __init__(
        self,
        scenario: ScenarioConfig,
        reward_fn: Optional[Callable[[StepRecord], float]] = None,
        disturbances: Optional[tuple[WeatherSeries, LoadSeries]] = None,
    ):
        scenario.validate()
        self.scenario = scenario
        self.reward_fn = reward_fn if reward_fn is not None else default_reward
        self._injected = disturbances
        self._ready = False
        self._step = 0
        self._seed: Optional[int] = None
        # per-step disturbances, materialized at reset
        self._ghi: list[float] = []
        self._t_am: list[float] = []
        self._wind: list[float] = []
        self._desired: list[list[tuple[float, ...]]] = []
        # mutable house state
        self._t_house: list[float] = []
        self._e_bat: list[float] = []
        self._u_ac_prev: list[int] = []
        self._u_mode_prev: list[int] = []
        self._prev_e_grid = 0.0
        self._surge_kw = [
            scenario.startup.surge_kw(h.thermal.p_ac_rated) for h in scenario.houses
        ]

    @property
    def horizon(self) -> int:
        return self.scenario.horizon_steps

    @property
    def step_index(self) -> int:
        return self._step

    @property
    def done(self) -> bool:
        return self._ready and self._step >= self.horizon

    # -- disturbance loading ------------------------------------------------

    def _load_disturbances(
        self, seed: Optional[int]
    ) -> tuple[WeatherSeries, LoadSeries]:
        sc = self.scenario
        if self._injected is not None:
            self._seed = seed
            weather, loads = self._injected
            if loads.n_houses != sc.n_houses:
                raise EngineError(
                    f"injected loads cover {loads.n_houses} houses, "
                    f"scenario has {sc.n_houses}"
                )
            return weather, loads
        src = sc.disturbances
        if isinstance(src, SyntheticSource):
            eff_seed = seed if seed is not None else src.seed
            self._seed = eff_seed
            return synth_disturbances(src.spec, sc.n_houses, sc.dt_hours, eff_seed)
        assert isinstance(src, FileSource)
        self._seed = seed
        weather = load_weather_csv(src.weather_path, sc.dt_hours, src.allow_upsample)
        mapping: Optional[CircuitMapping] = None
        if src.circuit_map_path is not None:
            mapping = CircuitMapping.from_yaml(src.circuit_map_path)
        parts = [
            load_loads_csv(p, sc.dt_hours, mapping, src.allow_upsample)
            for p in src.load_paths
        ]
        if len(parts) == 1 and sc.n_houses > 1:
            energies = np.tile(parts[0].energies, (1, sc.n_houses, 1))
        else:
            steps = min(len(p) for p in parts)
            energies = np.concatenate(
                [p.energies[:steps] for p in parts], axis=1
            )
        loads = LoadSeries(
            energies=energies,
            dt_hours=sc.dt_hours,
            clamped_negatives=sum(p.clamped_negatives for p in parts),
            ignored_columns=tuple(
                c for p in parts for c in p.ignored_columns
            ),
        )
        loads.validate()
        return weather, loads

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        sc = self.scenario
        weather, loads = self._load_disturbances(seed)
        n = min(len(weather), len(loads))
        if n < sc.horizon_steps:
            raise EngineError(
                f"disturbance series shorter than the horizon: "
                f"{n} steps available, {sc.horizon_steps} required"
            )
        self._ghi = [float(x) for x in weather.ghi_wm2[: sc.horizon_steps]]
        self._t_am = [float(x) for x in weather.t_ambient_c[: sc.horizon_steps]]
        self._wind = [float(x) for x in weather.wind_ms[: sc.horizon_steps]]
        arr = loads.energies[: sc.horizon_steps]
        self._desired = [
            [tuple(float(x) for x in arr[k, h]) for h in range(sc.n_houses)]
            for k in range(sc.horizon_steps)
        ]
        self._t_house = [h.initial_t_house for h in sc.houses]
        self._e_bat = [h.start_e_bat() for h in sc.houses]
        self._u_ac_prev = [0 for _ in sc.houses]
        self._u_mode_prev = [h.initial_u_mode for h in sc.houses]
        self._prev_e_grid = 0.0
        self._step = 0
        self._ready = True
        return self._observe()

    # -- observation --------------------------------------------------------

    def _potentials(self, k: int) -> list[float]:
        sc = self.scenario
        out = []
        for h in sc.houses:
            if h.has_pv:
                assert h.pv is not None
                out.append(
                    pv_potential(
                        self._ghi[k], self._t_am[k], self._wind[k], h.pv, sc.dt_hours
                    )
                )
            else:
                out.append(0.0)
        return out

    def _observe(self) -> np.ndarray:
        sc = self.scenario
        k = min(self._step, sc.horizon_steps - 1)
        obs = np.empty(OBS_HEADER_SLOTS + OBS_SLOTS_PER_HOUSE * sc.n_houses)
        hours = self._step * sc.dt_hours
        obs[0] = float(self._step)
        obs[1] = (hours % 24.0) / 24.0
        obs[2] = self._ghi[k]
        obs[3] = self._t_am[k]
        obs[4] = self._wind[k]
        obs[5] = self._prev_e_grid
        pots = self._potentials(k)
        i = OBS_HEADER_SLOTS
        for h in range(sc.n_houses):
            obs[i] = self._t_house[h]
            obs[i + 1] = self._e_bat[h]
            obs[i + 2] = pots[h]
            obs[i + 3 : i + 3 + N_PRIORITIES] = self._desired[k][h]
            i += OBS_SLOTS_PER_HOUSE
        return obs

    def controller_input(self) -> ControllerInput:
        """Snapshot handed to a bundled (or external) policy this step."""
        if not self._ready:
            raise EngineError("call reset() before reading controller input")
        if self._step >= self.horizon:
            raise EngineError("episode complete; call reset()")
        sc = self.scenario
        k = self._step
        pots = self._potentials(k)
        houses = tuple(
            HouseView(
                config=sc.houses[h],
                t_house=self._t_house[h],
                e_bat=self._e_bat[h],
                u_ac_prev=self._u_ac_prev[h],
                u_mode_prev=self._u_mode_prev[h],
                pv_potential=pots[h],
                desired=self._desired[k][h],
            )
            for h in range(sc.n_houses)
        )
        return ControllerInput(
            step=k,
            dt_hours=sc.dt_hours,
            grid_mode=sc.grid_mode,
            startup_mode=sc.startup_mode,
            startup=sc.startup,
            houses=houses,
        )

    # -- action validation --------------------------------------------------

    def _validate_actions(self, actions: Sequence[ActionVector]) -> None:
        sc = self.scenario
        if len(actions) != sc.n_houses:
            raise ValueError(
                f"expected {sc.n_houses} action vectors, got {len(actions)}"
            )
        for h, (a, cfg) in enumerate(zip(actions, sc.houses)):
            where = f"house {cfg.house_id}"
            if a.u_ac not in (0, 1):
                raise ValueError(f"{where}: u_ac must be 0 or 1, got {a.u_ac}")
            if a.u_mode not in (-1, 1):
                raise ValueError(f"{where}: u_mode must be -1 or +1, got {a.u_mode}")
            if not 0.0 <= a.u_pv <= 1.0:
                raise ValueError(f"{where}: u_pv must lie in [0, 1], got {a.u_pv}")
            if not cfg.has_pv and a.u_pv != 0.0:
                raise ValueError(
                    f"{where}: u_pv must be 0 on a house without PV, got {a.u_pv}"
                )
            if not 0.0 <= a.c <= 1.0:
                raise ValueError(f"{where}: c must lie in [0, 1], got {a.c}")
            if not 0.0 <= a.d <= 1.0:
                raise ValueError(f"{where}: d must lie in [0, 1], got {a.d}")
            if a.c * a.d != 0.0:
                raise ValueError(
                    f"{where}: c and d are mutually exclusive, got c={a.c}, d={a.d}"
                )
            if not cfg.has_battery and (a.c != 0.0 or a.d != 0.0):
                raise ValueError(
                    f"{where}: c and d must be 0 on a house without a battery"
                )
            if len(a.u_loads) != N_PRIORITIES:
                raise ValueError(
                    f"{where}: u_loads must have {N_PRIORITIES} entries, "
                    f"got {len(a.u_loads)}"
                )
            for j, u in enumerate(a.u_loads):
                if u not in (0, 1):
                    raise ValueError(
                        f"{where}: u_loads[{j}] must be 0 or 1, got {u}"
                    )

    # -- stepping -----------------------------------------------------------

    def step(
        self, actions: Optional[Sequence[ActionVector]] = None
    ) -> tuple[np.ndarray, float, bool, bool, StepRecord]:
        """Advance one step; returns (obs, reward, terminated, truncated,
        record)."""
        if not self._ready:
            raise EngineError("call reset() before step()")
        if self._step >= self.horizon:
            raise EngineError("episode complete; call reset()")
        sc = self.scenario
        k = self._step
        inp = self.controller_input()

        if actions is None:
            if sc.controller is ControllerKind.EXTERNAL:
                raise EngineError(
                    "scenario expects external actions; pass actions to step()"
                )
            commanded = ctl.decide(sc.controller.value, inp)
        else:
            commanded = list(actions)
            self._validate_actions(commanded)

        grid_backed = sc.grid_mode is GridMode.ON_GRID
        energies = [
            house_energies(
                u_ac=a.u_ac,
                u_pv=a.u_pv,
                c=a.c,
                d=a.d,
                u_loads=a.u_loads,
                potential_kwh=hv.pv_potential,
                desired=hv.desired,
                e_bat=hv.e_bat,
                battery=hv.config.battery,
                p_ac_rated=hv.config.thermal.p_ac_rated,
                dt_hours=sc.dt_hours,
                grid_backed=grid_backed,
            )
            for hv, a in zip(inp.houses, commanded)
        ]
        bal = community_balance(energies, sc.grid_mode)
        u_ac_now = [a.u_ac for a in commanded]
        attempted = startup_flags(u_ac_now, self._u_ac_prev)
        p_mis = startup_mismatch(
            bal.e_gen, u_ac_now, self._u_ac_prev, self._surge_kw, sc.dt_hours
        )
        outcome = resolve_step(bal.e_mis, p_mis, sc.grid_mode, sc.startup_mode)

        if outcome.verdict is Verdict.SERVE_NONE:
            realized = [
                ActionVector(
                    u_ac=0, u_mode=a.u_mode, u_pv=0.0, c=0.0, d=0.0,
                    u_loads=_LOADS_OFF,
                )
                for a in commanded
            ]
            final = [
                DeviceEnergies(
                    e_pv_potential=hv.pv_potential,
                    e_pv=0.0,
                    e_bat_c=0.0,
                    e_bat_d=0.0,
                    e_ac=0.0,
                    e_loads=_ZERO_LOADS,
                    e_load_total=0.0,
                )
                for hv in inp.houses
            ]
            e_gen = e_dem = e_mis = e_grid = 0.0
        else:
            realized = list(commanded)
            if sc.grid_mode is GridMode.OFF_GRID:
                final = shave_offgrid_surplus(energies)
                e_gen = math.fsum(e.generation for e in final)
                e_dem = math.fsum(e.demand for e in final)
                e_mis = e_gen - e_dem
                e_grid = 0.0  # an island exchanges nothing
            else:
                final = energies
                e_gen, e_dem, e_mis = bal.e_gen, bal.e_dem, bal.e_mis
                e_grid = e_mis

        # commit device states
        t_next = []
        e_bat_next = []
        for h, (cfg, a, e) in enumerate(zip(sc.houses, realized, final)):
            t_next.append(
                thermal_step(
                    self._t_house[h], a.u_ac, a.u_mode, self._t_am[k], cfg.thermal
                )
            )
            if cfg.has_battery:
                assert cfg.battery is not None
                bp = cfg.battery
                nxt = self._e_bat[h] + bp.eta_c * e.e_bat_c - e.e_bat_d / bp.eta_d
                e_bat_next.append(min(max(nxt, bp.e_min), bp.e_max))
            else:
                e_bat_next.append(0.0)

        violations = []
        for cfg, t in zip(sc.houses, t_next):
            lo, hi = cfg.thermostat.t_mode_low, cfg.thermostat.t_mode_high
            violations.append(max(t - hi, 0.0) + max(lo - t, 0.0))

        record = StepRecord(
            step=k,
            ghi_wm2=self._ghi[k],
            t_ambient_c=self._t_am[k],
            wind_ms=self._wind[k],
            desired=tuple(self._desired[k]),
            commanded=tuple(commanded),
            realized=tuple(realized),
            energies=tuple(final),
            e_gen=e_gen,
            e_dem=e_dem,
            e_mis=e_mis,
            e_grid=e_grid,
            candidate_e_mis=bal.e_mis,
            candidate_p_mis_ac=p_mis,
            attempted_startups=attempted,
            verdict=outcome.verdict,
            reason=outcome.reason,
            t_house=tuple(t_next),
            e_bat=tuple(e_bat_next),
            comfort_violation_degc=tuple(violations),
        )

        self._t_house = t_next
        self._e_bat = e_bat_next
        self._u_ac_prev = [a.u_ac for a in realized]
        self._u_mode_prev = [a.u_mode for a in realized]
        self._prev_e_grid = e_grid
        self._step = k + 1

        obs = self._observe()
        reward = self.reward_fn(record)
        truncated = self._step >= self.horizon
        return obs, reward, False, truncated, record


def run_episode(
    scenario: ScenarioConfig,
    seed: Optional[int] = None,
    collect_timing: bool = True,
) -> Trace:
    """Run one full episode under the scenario's bundled controller."""
    if scenario.controller is ControllerKind.EXTERNAL:
        raise EngineError(
            "run_episode needs a bundled controller; drive an Engine directly "
            "for external actions"
        )
    eng = Engine(scenario)
    eng.reset(seed)
    records: list[StepRecord] = []
    timings: Optional[list[float]] = [] if collect_timing else None
    for _ in range(scenario.horizon_steps):
        t0 = time.perf_counter()
        _, _, _, _, rec = eng.step()
        if timings is not None:
            timings.append((time.perf_counter() - t0) * 1e3)
        records.append(rec)
    return Trace(
        scenario=scenario,
        digest=scenario_digest(scenario),
        seed=eng._seed,
        records=records,
        step_ms=timings,
    )
