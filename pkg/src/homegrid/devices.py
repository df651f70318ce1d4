"""Per-step device physics: house thermal response, PV array output,
battery bucket dispatch, AC and load energies.

All energies are kWh per step; powers are kW. Functions are pure so they
can be driven both by the engine and by controllers probing candidate
dispatches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .scenario import BatteryParams, N_PRIORITIES, PvParams, ThermalParams

__all__ = [
    "DeviceEnergies",
    "thermal_step",
    "module_temperature",
    "pv_potential",
    "pv_output",
    "battery_step",
    "ac_energy",
    "load_energy",
    "house_energies",
]


def thermal_step(
    t_house: float,
    u_ac: int,
    u_mode: int,
    t_ambient: float,
    p: ThermalParams,
) -> float:
    """Advance indoor temperature one step.

    The AC injects u_mode * cop * p_ac_rated degrees-equivalent when running
    (u_mode -1 cools, +1 heats); the ambient pulls with weight d.
    """
    if u_ac not in (0, 1):
        raise ValueError(f"u_ac must be 0 or 1, got {u_ac}")
    if u_mode not in (-1, 1):
        raise ValueError(f"u_mode must be -1 or +1, got {u_mode}")
    q_ac = p.cop * p.p_ac_rated
    return p.a * t_house + u_ac * u_mode * q_ac + p.d * t_ambient


def module_temperature(
    ghi_wm2: float, t_ambient: float, wind_ms: float, p: PvParams
) -> float:
    """Cell temperature from irradiance and wind-dependent heat loss."""
    if p.faiman_additive_wind:
        return t_ambient + ghi_wm2 / (p.u0 + p.u1 + wind_ms)
    return t_ambient + ghi_wm2 / (p.u0 + p.u1 * wind_ms)


def pv_potential(
    ghi_wm2: float,
    t_ambient: float,
    wind_ms: float,
    p: PvParams,
    dt_hours: float,
) -> float:
    """Maximum array energy available this step, kWh, clamped at zero.

    Rated output scales with irradiance and derates linearly in cell
    temperature above the rating point.
    """
    if ghi_wm2 < 0.0:
        raise ValueError(f"ghi must be >= 0, got {ghi_wm2}")
    if ghi_wm2 == 0.0 or p.n_panels == 0:
        return 0.0
    t_m = module_temperature(ghi_wm2, t_ambient, wind_ms, p)
    derate = 1.0 + (p.gamma_pct_per_degc / 100.0) * (t_m - p.t_std)
    e = p.n_panels * p.p_panel_rated * (ghi_wm2 / p.g_std) * derate * dt_hours
    return max(e, 0.0)


def pv_output(u_pv: float, potential_kwh: float) -> float:
    """Curtailed array energy, u_pv * potential."""
    if not 0.0 <= u_pv <= 1.0:
        raise ValueError(f"u_pv must lie in [0, 1], got {u_pv}")
    return u_pv * potential_kwh


def battery_step(
    e_bat: float,
    c: float,
    d: float,
    e_mismatch: float,
    p: BatteryParams,
) -> tuple[float, float, float]:
    """One dispatch step; returns (e_bat_next, e_charge, e_discharge) in kWh.

    e_charge is energy into the cells before efficiency, e_discharge energy
    delivered to the bus after efficiency. e_mismatch bounds both dispatch
    magnitudes; pass math.inf to lift the bound (grid-backed operation).
    Charge and discharge are mutually exclusive.
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"c must lie in [0, 1], got {c}")
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"d must lie in [0, 1], got {d}")
    if c * d != 0.0:
        raise ValueError(f"simultaneous charge and discharge: c={c}, d={d}")
    if e_mismatch < 0.0:
        raise ValueError(f"e_mismatch must be >= 0, got {e_mismatch}")
    if not p.e_min <= e_bat <= p.e_max:
        raise ValueError(
            f"e_bat outside [{p.e_min}, {p.e_max}]: {e_bat}"
        )
    e_c = c * min((p.e_max - e_bat) / p.eta_c, p.e_charge_cap, e_mismatch)
    e_d = d * min((e_bat - p.e_min) * p.eta_d, p.e_discharge_cap, e_mismatch)
    e_next = e_bat + p.eta_c * e_c - e_d / p.eta_d
    # rounding can land a hair outside the envelope; pin it back
    e_next = min(max(e_next, p.e_min), p.e_max)
    return e_next, e_c, e_d


def ac_energy(u_ac: int, p_ac_rated: float, dt_hours: float) -> float:
    return u_ac * p_ac_rated * dt_hours


def load_energy(
    u_loads: Sequence[int], desired: Sequence[float]
) -> tuple[tuple[float, ...], float]:
    """Served energy per priority group and its total."""
    if len(u_loads) != N_PRIORITIES or len(desired) != N_PRIORITIES:
        raise ValueError(
            f"expected {N_PRIORITIES} load groups, got "
            f"{len(u_loads)} switches / {len(desired)} demands"
        )
    served = []
    for j, (u, e) in enumerate(zip(u_loads, desired)):
        if u not in (0, 1):
            raise ValueError(f"u_loads[{j}] must be 0 or 1, got {u}")
        if e < 0.0:
            raise ValueError(f"desired[{j}] must be >= 0, got {e}")
        served.append(u * e)
    return tuple(served), math.fsum(served)


@dataclass(frozen=True)
class DeviceEnergies:
    """Realized (or candidate) per-house energies for one step, kWh."""

    e_pv_potential: float
    e_pv: float
    e_bat_c: float  # into the cells
    e_bat_d: float  # delivered to the bus
    e_ac: float
    e_loads: tuple[float, ...]
    e_load_total: float

    @property
    def e_d2(self) -> float:
        """Controllable demand: loads plus AC."""
        return self.e_load_total + self.e_ac

    @property
    def generation(self) -> float:
        return self.e_pv + self.e_bat_d

    @property
    def demand(self) -> float:
        return self.e_d2 + self.e_bat_c


def house_energies(
    *,
    u_ac: int,
    u_pv: float,
    c: float,
    d: float,
    u_loads: Sequence[int],
    potential_kwh: float,
    desired: Sequence[float],
    e_bat: float,
    battery: Optional[BatteryParams],
    p_ac_rated: float,
    dt_hours: float,
    grid_backed: bool,
) -> DeviceEnergies:
    """Evaluate one house's energies for a candidate action without
    committing any state.

    Off a grid connection the battery dispatch magnitude is bounded by the
    house's own PV/demand mismatch; grid_backed lifts that bound.
    """
    e_ac = ac_energy(u_ac, p_ac_rated, dt_hours)
    served, e_load_total = load_energy(u_loads, desired)
    e_d2 = e_load_total + e_ac
    e_pv = pv_output(u_pv, potential_kwh)
    if battery is None:
        if c != 0.0 or d != 0.0:
            raise ValueError(
                f"battery commands c={c}, d={d} on a house without a battery"
            )
        e_c = e_d = 0.0
    else:
        e_m = math.inf if grid_backed else abs(e_pv - e_d2)
        _, e_c, e_d = battery_step(e_bat, c, d, e_m, battery)
    return DeviceEnergies(
        e_pv_potential=potential_kwh,
        e_pv=e_pv,
        e_bat_c=e_c,
        e_bat_d=e_d,
        e_ac=e_ac,
        e_loads=served,
        e_load_total=e_load_total,
    )
