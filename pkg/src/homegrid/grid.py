"""Community-level power balance and feasibility: aggregate generation and
demand, compressor start-up surge accounting, the serve-all-or-nothing
decision for islanded operation, and surplus curtailment so an island never
exports.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

from .devices import DeviceEnergies
from .scenario import GridMode, StartupMode

__all__ = [
    "SERVE_TOL_KWH",
    "SERVE_TOL_KW",
    "Verdict",
    "Reason",
    "CommunityBalance",
    "FeasibilityOutcome",
    "community_balance",
    "startup_flags",
    "startup_mismatch",
    "resolve_step",
    "shave_offgrid_surplus",
]

# Load-matching controllers produce PV setpoints whose product with the
# potential can land one ulp short of the demand they target; without a
# tolerance those steps would read as deficits and black out the community.
SERVE_TOL_KWH = 1e-9
SERVE_TOL_KW = 1e-9


class Verdict(enum.Enum):
    SERVE_ALL = "serve_all"
    SERVE_NONE = "serve_none"


class Reason(enum.Enum):
    ON_GRID = "on_grid"
    FEASIBLE = "feasible"
    ENERGY_DEFICIT = "energy_deficit"
    STARTUP_DEFICIT = "startup_deficit"


@dataclass(frozen=True)
class CommunityBalance:
    """Aggregate step energies, kWh. e_mis = e_gen - e_dem; e_grid follows
    the export-positive convention."""

    e_gen: float
    e_dem: float
    e_mis: float
    e_grid: float


@dataclass(frozen=True)
class FeasibilityOutcome:
    verdict: Verdict
    reason: Reason
    e_mis: float
    p_mis_ac: float


def community_balance(
    energies: Sequence[DeviceEnergies], grid_mode: GridMode
) -> CommunityBalance:
    """Sum house energies into the community balance.

    On-grid, the connection absorbs the mismatch (e_grid = e_mis); off-grid
    there is no exchange to record, so e_grid = e_mis only as a diagnostic
    of the raw imbalance before feasibility enforcement.
    """
    e_gen = math.fsum(e.generation for e in energies)
    e_dem = math.fsum(e.demand for e in energies)
    e_mis = e_gen - e_dem
    return CommunityBalance(e_gen=e_gen, e_dem=e_dem, e_mis=e_mis, e_grid=e_mis)


def startup_flags(
    u_ac_now: Sequence[int], u_ac_prev: Sequence[int]
) -> tuple[int, ...]:
    """1 for each AC switching off->on this step, else 0."""
    if len(u_ac_now) != len(u_ac_prev):
        raise ValueError(
            f"u_ac_now and u_ac_prev lengths differ: "
            f"{len(u_ac_now)} vs {len(u_ac_prev)}"
        )
    flags = []
    for i, (now, prev) in enumerate(zip(u_ac_now, u_ac_prev)):
        if now not in (0, 1) or prev not in (0, 1):
            raise ValueError(f"AC switches must be 0 or 1 (house index {i})")
        flags.append(1 if now == 1 and prev == 0 else 0)
    return tuple(flags)


def startup_mismatch(
    e_gen: float,
    u_ac_now: Sequence[int],
    u_ac_prev: Sequence[int],
    p_surge_kw: Union[float, Sequence[float]],
    dt_hours: float,
) -> float:
    """Surplus of average generated power over total compressor surge, kW.

    p_surge_kw is a scalar if every AC surges alike, or one value per house.
    """
    flags = startup_flags(u_ac_now, u_ac_prev)
    if isinstance(p_surge_kw, (int, float)):
        surge = [float(p_surge_kw)] * len(flags)
    else:
        surge = [float(p) for p in p_surge_kw]
        if len(surge) != len(flags):
            raise ValueError(
                f"p_surge_kw must be scalar or per-house, got {len(surge)} "
                f"values for {len(flags)} houses"
            )
    total_surge = math.fsum(f * p for f, p in zip(flags, surge))
    return e_gen / dt_hours - total_surge


def resolve_step(
    e_mis: float,
    p_mis_ac: float,
    grid_mode: GridMode,
    startup_mode: StartupMode,
) -> FeasibilityOutcome:
    """Serve-all-or-nothing decision for the step.

    On-grid steps always serve. Off-grid steps serve only if generation
    covers demand, and additionally (under the start-up constraint) if
    generated power covers the compressor surge of every AC turning on.
    """
    if grid_mode is GridMode.ON_GRID:
        return FeasibilityOutcome(Verdict.SERVE_ALL, Reason.ON_GRID, e_mis, p_mis_ac)
    if e_mis < -SERVE_TOL_KWH:
        return FeasibilityOutcome(
            Verdict.SERVE_NONE, Reason.ENERGY_DEFICIT, e_mis, p_mis_ac
        )
    if startup_mode is StartupMode.WACSC and p_mis_ac < -SERVE_TOL_KW:
        return FeasibilityOutcome(
            Verdict.SERVE_NONE, Reason.STARTUP_DEFICIT, e_mis, p_mis_ac
        )
    return FeasibilityOutcome(Verdict.SERVE_ALL, Reason.FEASIBLE, e_mis, p_mis_ac)


def shave_offgrid_surplus(
    energies: Sequence[DeviceEnergies],
) -> list[DeviceEnergies]:
    """Trim over-generation on a served islanded step so gen equals demand.

    An island has nowhere to send surplus, so any positive mismatch left by
    the dispatch is curtailed at the source: PV output first, then battery
    discharge, walking houses from the highest index down. Returns adjusted
    copies; never touches demand.
    """
    e_gen = math.fsum(e.generation for e in energies)
    e_dem = math.fsum(e.demand for e in energies)
    surplus = e_gen - e_dem
    if surplus <= 0.0:
        return list(energies)
    out = list(energies)
    for i in range(len(out) - 1, -1, -1):
        if surplus <= 0.0:
            break
        cut = min(out[i].e_pv, surplus)
        if cut > 0.0:
            out[i] = replace(out[i], e_pv=out[i].e_pv - cut)
            surplus -= cut
    for i in range(len(out) - 1, -1, -1):
        if surplus <= 0.0:
            break
        cut = min(out[i].e_bat_d, surplus)
        if cut > 0.0:
            out[i] = replace(out[i], e_bat_d=out[i].e_bat_d - cut)
            surplus -= cut
    return out
