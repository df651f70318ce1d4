"""Episode figures rendered straight to files.

Uses the object-oriented matplotlib API (no pyplot, no GUI backend), so it
is safe in headless runs. One figure per device family: PV, battery,
indoor temperature, loads, and the community generation balance.
"""

from __future__ import annotations

import math
from pathlib import Path

from matplotlib.figure import Figure

from .engine import Trace
from .scenario import N_PRIORITIES

__all__ = ["render_episode_figures"]

_FIGSIZE = (9.0, 3.6)
_DPI = 110


def _hours(trace: Trace) -> list[float]:
    return [rec.step * trace.dt_hours for rec in trace.records]


def _save(fig: Figure, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    return path


def _figure_pv(trace: Trace, path: Path) -> Path:
    fig = Figure(figsize=_FIGSIZE)
    ax = fig.add_subplot()
    t = _hours(trace)
    n = trace.n_houses
    potential = [
        math.fsum(r.energies[h].e_pv_potential for h in range(n))
        for r in trace.records
    ]
    used = [
        math.fsum(r.energies[h].e_pv for h in range(n)) for r in trace.records
    ]
    ax.plot(t, potential, label="potential", lw=0.9)
    ax.plot(t, used, label="dispatched", lw=0.9)
    ax.set_xlabel("time [h]")
    ax.set_ylabel("PV energy [kWh/step]")
    ax.set_title("PV potential vs dispatched")
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def _figure_battery(trace: Trace, path: Path) -> Path:
    fig = Figure(figsize=_FIGSIZE)
    ax = fig.add_subplot()
    t = _hours(trace)
    any_battery = False
    for h, cfg in enumerate(trace.scenario.houses):
        if not cfg.has_battery:
            continue
        any_battery = True
        ax.plot(
            t,
            [r.e_bat[h] for r in trace.records],
            label=f"house {cfg.house_id}",
            lw=0.9,
        )
    if not any_battery:
        ax.text(0.5, 0.5, "no batteries in scenario", ha="center", va="center",
                transform=ax.transAxes)
    else:
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlabel("time [h]")
    ax.set_ylabel("stored energy [kWh]")
    ax.set_title("Battery state of charge")
    return _save(fig, path)


def _figure_temperature(trace: Trace, path: Path) -> Path:
    fig = Figure(figsize=_FIGSIZE)
    ax = fig.add_subplot()
    t = _hours(trace)
    ax.plot(
        t, [r.t_ambient_c for r in trace.records],
        label="ambient", color="0.6", lw=0.9,
    )
    for h, cfg in enumerate(trace.scenario.houses):
        ax.plot(
            t,
            [r.t_house[h] for r in trace.records],
            label=f"house {cfg.house_id}",
            lw=0.9,
        )
    lo, hi = trace.house_bands()[0]
    ax.axhline(lo, color="k", ls=":", lw=0.7)
    ax.axhline(hi, color="k", ls=":", lw=0.7)
    ax.set_xlabel("time [h]")
    ax.set_ylabel("temperature [degC]")
    ax.set_title("Indoor temperature")
    ax.legend(loc="upper right", fontsize=8, ncol=2)
    return _save(fig, path)


def _figure_loads(trace: Trace, path: Path) -> Path:
    fig = Figure(figsize=_FIGSIZE)
    ax = fig.add_subplot()
    t = _hours(trace)
    n = trace.n_houses
    desired = [
        math.fsum(math.fsum(r.desired[h]) for h in range(n))
        for r in trace.records
    ]
    served = [
        math.fsum(r.energies[h].e_load_total for h in range(n))
        for r in trace.records
    ]
    ax.plot(t, desired, label="desired", lw=0.9)
    ax.plot(t, served, label="served", lw=0.9)
    ax.set_xlabel("time [h]")
    ax.set_ylabel("load energy [kWh/step]")
    ax.set_title("Desired vs served loads")
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def _figure_generation(trace: Trace, path: Path) -> Path:
    fig = Figure(figsize=_FIGSIZE)
    ax = fig.add_subplot()
    t = _hours(trace)
    ax.plot(t, [r.e_gen for r in trace.records], label="generation", lw=0.9)
    ax.plot(t, [r.e_dem for r in trace.records], label="demand", lw=0.9)
    ax.plot(
        t, [r.e_grid for r in trace.records],
        label="grid exchange", lw=0.9, ls="--",
    )
    ax.set_xlabel("time [h]")
    ax.set_ylabel("energy [kWh/step]")
    ax.set_title("Community balance")
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def render_episode_figures(trace: Trace, outdir: str | Path) -> list[Path]:
    """Render the five standard episode figures as PNG files."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        _figure_pv(trace, outdir / "pv.png"),
        _figure_battery(trace, outdir / "battery.png"),
        _figure_temperature(trace, outdir / "temperature.png"),
        _figure_loads(trace, outdir / "loads.png"),
        _figure_generation(trace, outdir / "generation.png"),
    ]
