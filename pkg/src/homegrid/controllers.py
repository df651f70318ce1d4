"""Bundled dispatch policies.

The baseline policy runs each house independently: hysteresis thermostat,
PV matched to the house's own demand when islanded, battery charged from
surplus or discharged into deficit, every load group switched on. The
rule-based policy starts from the baseline candidate and, when the island
cannot carry it, sheds in a fixed order (pending compressor starts, running
ACs, battery charging, then load groups lowest priority first) until the
step is feasible.

Controllers are pure: they read a ControllerInput snapshot and return one
ActionVector per house.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .devices import DeviceEnergies, ac_energy, house_energies
from .grid import SERVE_TOL_KW, SERVE_TOL_KWH, startup_mismatch
from .scenario import (
    BatteryParams,
    GridMode,
    HouseConfig,
    N_PRIORITIES,
    StartupMode,
    StartupParams,
    ThermostatParams,
)

__all__ = [
    "ActionVector",
    "HouseView",
    "ControllerInput",
    "thermostat",
    "baseline_pv",
    "baseline_battery",
    "baseline_loads",
    "baseline_step",
    "max_charge_dispatch",
    "priority_stack",
    "rule_based_step",
    "CONTROLLERS",
    "decide",
]

ALL_ON = tuple([1] * N_PRIORITIES)
ALL_OFF = tuple([0] * N_PRIORITIES)


@dataclass(frozen=True)
class ActionVector:
    """One house's commands for one step."""

    u_ac: int  # 0 off, 1 on
    u_mode: int  # -1 cooling, +1 heating
    u_pv: float  # curtailment fraction in [0, 1]
    c: float  # charge command in [0, 1]
    d: float  # discharge command in [0, 1]
    u_loads: tuple[int, ...]  # one switch per priority group


@dataclass(frozen=True)
class HouseView:
    """Controller-facing snapshot of one house at the start of a step."""

    config: HouseConfig
    t_house: float
    e_bat: float
    u_ac_prev: int
    u_mode_prev: int
    pv_potential: float
    desired: tuple[float, ...]


@dataclass(frozen=True)
class ControllerInput:
    step: int
    dt_hours: float
    grid_mode: GridMode
    startup_mode: StartupMode
    startup: StartupParams
    houses: tuple[HouseView, ...]


Controller = Callable[[ControllerInput], list[ActionVector]]


def thermostat(
    t_house: float,
    u_ac_prev: int,
    u_mode_prev: int,
    p: ThermostatParams,
) -> tuple[int, int]:
    """Two-band hysteresis: the outer band picks heating or cooling, the
    inner band switches the AC, both holding their previous value inside
    the band."""
    if u_mode_prev not in (-1, 1):
        raise ValueError(f"u_mode_prev must be -1 or +1, got {u_mode_prev}")
    if u_ac_prev not in (0, 1):
        raise ValueError(f"u_ac_prev must be 0 or 1, got {u_ac_prev}")
    cold, hot = (-1, 1) if p.mode_select_inverted else (1, -1)
    if t_house <= p.t_mode_low:
        u_mode = cold
    elif t_house >= p.t_mode_high:
        u_mode = hot
    else:
        u_mode = u_mode_prev
    if u_mode == -1:  # cooling
        if t_house >= p.t_ac_high:
            u_ac = 1
        elif t_house <= p.t_ac_low:
            u_ac = 0
        else:
            u_ac = u_ac_prev
    else:  # heating, mirrored band
        if t_house <= p.t_ac_low:
            u_ac = 1
        elif t_house >= p.t_ac_high:
            u_ac = 0
        else:
            u_ac = u_ac_prev
    return u_ac, u_mode


def baseline_pv(grid_mode: GridMode, potential: float, e_d1: float) -> float:
    """PV setpoint: islanded output chases the house's net demand e_d1;
    grid-backed output runs flat out."""
    if potential <= 0.0:
        return 0.0
    if grid_mode is GridMode.ON_GRID:
        return 1.0
    return min(max(e_d1 / potential, 0.0), 1.0)


def baseline_battery(
    grid_mode: GridMode,
    potential: float,
    e_pv: float,
    e_d2: float,
    e_bat: float,
    p: BatteryParams,
) -> tuple[int, int]:
    """Charge from own surplus, discharge into own deficit; grid-backed
    operation charges until full. Charge wins when both fire."""
    if grid_mode is GridMode.ON_GRID:
        return (1 if e_bat < p.e_max else 0), 0
    c = 1 if (potential > 0.0 and potential >= e_d2) else 0
    d = 1 if e_pv < e_d2 else 0
    if c:
        d = 0
    return c, d


def baseline_loads(desired: Sequence[float]) -> tuple[int, ...]:
    """Every group with positive demand switched on."""
    return tuple(1 if e > 0.0 else 0 for e in desired)


def _baseline_house(
    hv: HouseView, grid_mode: GridMode, dt_hours: float
) -> ActionVector:
    cfg = hv.config
    u_ac, u_mode = thermostat(hv.t_house, hv.u_ac_prev, hv.u_mode_prev, cfg.thermostat)
    u_loads = baseline_loads(hv.desired)
    e_load = math.fsum(hv.desired)
    e_ac = ac_energy(u_ac, cfg.thermal.p_ac_rated, dt_hours)
    e_d2 = e_load + e_ac
    potential = hv.pv_potential if cfg.has_pv else 0.0

    c = d = 0
    e_c_pred = e_d_pred = 0.0
    if cfg.has_battery:
        bp = cfg.battery
        assert bp is not None
        c, d = baseline_battery(
            grid_mode, potential, min(potential, e_d2), e_d2, hv.e_bat, bp
        )
        if grid_mode is GridMode.OFF_GRID:
            if c:
                e_c_pred = min(
                    (bp.e_max - hv.e_bat) / bp.eta_c,
                    bp.e_charge_cap,
                    max(potential - e_d2, 0.0),
                )
            if d:
                e_d_pred = min(
                    (hv.e_bat - bp.e_min) * bp.eta_d,
                    bp.e_discharge_cap,
                    max(e_d2 - potential, 0.0),
                )

    u_pv = 0.0
    if cfg.has_pv:
        # net demand the array should chase after battery flows
        e_d1 = e_d2 + e_c_pred - e_d_pred
        u_pv = baseline_pv(grid_mode, potential, e_d1)

    return ActionVector(
        u_ac=u_ac,
        u_mode=u_mode,
        u_pv=u_pv,
        c=float(c),
        d=float(d),
        u_loads=u_loads,
    )


def baseline_step(inp: ControllerInput) -> list[ActionVector]:
    return [_baseline_house(hv, inp.grid_mode, inp.dt_hours) for hv in inp.houses]


def max_charge_dispatch(e_bat: float, p: BatteryParams) -> float:
    """Largest pre-efficiency charge the battery can absorb this step."""
    return min((p.e_max - e_bat) / p.eta_c, p.e_charge_cap)


def priority_stack(
    desired: Sequence[Sequence[float]], e_mis_l: float
) -> list[tuple[int, ...]]:
    """Greedy prefix shed across the community.

    Items are ordered by priority group first, house index second. Groups
    are kept while the running served total stays within the budget
    (total desired minus e_mis_l); at the first refusal everything after it
    is shed. Zero-demand groups are always off. Accumulation is plain
    sequential addition so an exhaustive prefix enumeration reproduces the
    cut exactly.
    """
    n_houses = len(desired)
    for h, row in enumerate(desired):
        if len(row) != N_PRIORITIES:
            raise ValueError(
                f"desired[{h}] must have {N_PRIORITIES} entries, got {len(row)}"
            )
    bits = [[0] * N_PRIORITIES for _ in range(n_houses)]
    if e_mis_l <= 0.0:
        for h in range(n_houses):
            for j in range(N_PRIORITIES):
                if desired[h][j] > 0.0:
                    bits[h][j] = 1
        return [tuple(b) for b in bits]

    total = 0.0
    for j in range(N_PRIORITIES):
        for h in range(n_houses):
            total += desired[h][j]
    budget = total - e_mis_l
    cum = 0.0
    serving = True
    for j in range(N_PRIORITIES):
        for h in range(n_houses):
            e = desired[h][j]
            if e <= 0.0:
                continue
            if serving and cum + e <= budget:
                bits[h][j] = 1
                cum += e
            else:
                serving = False
    return [tuple(b) for b in bits]


def _measure(
    inp: ControllerInput, actions: Sequence[ActionVector]
) -> tuple[float, float]:
    """Candidate community mismatch (kWh) and start-up power margin (kW)."""
    e_gen = 0.0
    e_dem = 0.0
    for hv, a in zip(inp.houses, actions):
        e = house_energies(
            u_ac=a.u_ac,
            u_pv=a.u_pv,
            c=a.c,
            d=a.d,
            u_loads=a.u_loads,
            potential_kwh=hv.pv_potential if hv.config.has_pv else 0.0,
            desired=hv.desired,
            e_bat=hv.e_bat,
            battery=hv.config.battery,
            p_ac_rated=hv.config.thermal.p_ac_rated,
            dt_hours=inp.dt_hours,
            grid_backed=False,
        )
        e_gen += e.generation
        e_dem += e.demand
    surge = [
        inp.startup.surge_kw(hv.config.thermal.p_ac_rated) for hv in inp.houses
    ]
    p_mis = startup_mismatch(
        e_gen,
        [a.u_ac for a in actions],
        [hv.u_ac_prev for hv in inp.houses],
        surge,
        inp.dt_hours,
    )
    return e_gen - e_dem, p_mis


def rule_based_step(inp: ControllerInput) -> list[ActionVector]:
    """Feasibility-preserving shedding ladder for islanded communities.

    Starts from the baseline candidate, then until the step would serve:
    cancel pending compressor starts, switch off running ACs, idle charging
    batteries, shed load groups through the priority stack, and keep
    shedding served groups from the tail while the recomputed balance still
    falls short (battery-covered groups do not move the community balance
    when shed, so the stack's budget alone cannot be trusted). Under the
    start-up constraint any surviving compressor starts are deferred until
    generated power covers their surge.
    """
    if inp.grid_mode is not GridMode.OFF_GRID:
        raise ValueError("rule-based controller requires off-grid operation")
    wacsc = inp.startup_mode is StartupMode.WACSC
    actions = baseline_step(inp)
    e_mis, p_mis = _measure(inp, actions)
    if e_mis >= -SERVE_TOL_KWH and (not wacsc or p_mis >= -SERVE_TOL_KW):
        return actions

    prev = [hv.u_ac_prev for hv in inp.houses]

    if e_mis < -SERVE_TOL_KWH:
        pending = [i for i, a in enumerate(actions) if a.u_ac == 1 and prev[i] == 0]
        running = [i for i, a in enumerate(actions) if a.u_ac == 1 and prev[i] == 1]
        for i in pending + running:
            if e_mis >= -SERVE_TOL_KWH:
                break
            actions[i] = replace(actions[i], u_ac=0)
            e_mis, p_mis = _measure(inp, actions)

    if e_mis < -SERVE_TOL_KWH:
        for i, a in enumerate(actions):
            if e_mis >= -SERVE_TOL_KWH:
                break
            if a.c > 0.0:
                actions[i] = replace(actions[i], c=0.0)
                e_mis, p_mis = _measure(inp, actions)

    if e_mis < -SERVE_TOL_KWH:
        desired = [hv.desired for hv in inp.houses]
        bits = priority_stack(desired, -e_mis)
        actions = [
            replace(a, u_loads=bits[i]) for i, a in enumerate(actions)
        ]
        e_mis, p_mis = _measure(inp, actions)
        while e_mis < -SERVE_TOL_KWH:
            last = None
            for j in range(N_PRIORITIES):
                for h in range(len(actions)):
                    if actions[h].u_loads[j] == 1 and desired[h][j] > 0.0:
                        last = (h, j)
            if last is None:
                break
            h, j = last
            u = list(actions[h].u_loads)
            u[j] = 0
            actions[h] = replace(actions[h], u_loads=tuple(u))
            e_mis, p_mis = _measure(inp, actions)

    if wacsc:
        while p_mis < -SERVE_TOL_KW:
            starts = [
                i for i, a in enumerate(actions) if a.u_ac == 1 and prev[i] == 0
            ]
            if not starts:
                break
            actions[starts[0]] = replace(actions[starts[0]], u_ac=0)
            e_mis, p_mis = _measure(inp, actions)

    return actions


CONTROLLERS: dict[str, Controller] = {
    "baseline": baseline_step,
    "rulebased": rule_based_step,
}


def decide(name: str, inp: ControllerInput) -> list[ActionVector]:
    try:
        controller = CONTROLLERS[name]
    except KeyError:
        raise ValueError(
            f"unknown controller {name!r}; available: {sorted(CONTROLLERS)}"
        ) from None
    return controller(inp)
