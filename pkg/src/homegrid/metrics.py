"""Episode resiliency metrics.

Thermal resiliency (trm_h) is the fraction of house-steps whose indoor
temperature stays inside the comfort band; trm_deviation_degc reports how
far outside the band the average house-step sits. Load resiliency (lrm) is
served over desired energy, for the critical group alone and for all
groups. The generation ratio (lgr) is total generation over total demand;
an island that never exports holds it at one.

Zero-demand denominators yield None and a flag rather than NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import Trace
from .scenario import N_PRIORITIES

__all__ = [
    "MetricsReport",
    "trm_thermal",
    "trm_deviation_degc",
    "lrm",
    "lrm_critical",
    "lrm_overall",
    "lgr",
    "timing_summary",
    "compute_report",
]


def _bands(
    trace: Trace, band: Optional[tuple[float, float]]
) -> list[tuple[float, float]]:
    if band is not None:
        lo, hi = band
        if not lo < hi:
            raise ValueError(f"band low < high violated: {band}")
        return [band] * trace.n_houses
    return list(trace.house_bands())


def trm_thermal(
    trace: Trace, band: Optional[tuple[float, float]] = None
) -> Optional[float]:
    """Fraction of (house, step) samples inside the comfort band.

    The band defaults to each house's thermostat mode band.
    """
    bands = _bands(trace, band)
    if not trace.records:
        return None
    hits = 0
    total = 0
    for rec in trace.records:
        for h, t in enumerate(rec.t_house):
            lo, hi = bands[h]
            hits += 1 if lo <= t <= hi else 0
            total += 1
    return hits / total


def trm_deviation_degc(
    trace: Trace, band: Optional[tuple[float, float]] = None
) -> Optional[float]:
    """Mean distance outside the comfort band, degC per house-step."""
    bands = _bands(trace, band)
    if not trace.records:
        return None
    dev = 0.0
    total = 0
    for rec in trace.records:
        for h, t in enumerate(rec.t_house):
            lo, hi = bands[h]
            dev += max(t - hi, 0.0) + max(lo - t, 0.0)
            total += 1
    return dev / total


def lrm(
    trace: Trace,
    priorities: Sequence[int],
    house: Optional[int] = None,
) -> Optional[float]:
    """Served over desired energy for the given priority groups (0-based).

    Restricting to one house index computes that house's ratio. Returns
    None when nothing was desired.
    """
    for j in priorities:
        if not 0 <= j < N_PRIORITIES:
            raise ValueError(f"priority index out of range: {j}")
    served = 0.0
    desired = 0.0
    for rec in trace.records:
        houses = range(len(rec.desired)) if house is None else (house,)
        for h in houses:
            for j in priorities:
                desired += rec.desired[h][j]
                served += rec.energies[h].e_loads[j]
    if desired == 0.0:
        return None
    return served / desired


def lrm_critical(trace: Trace, house: Optional[int] = None) -> Optional[float]:
    return lrm(trace, (0,), house)


def lrm_overall(trace: Trace, house: Optional[int] = None) -> Optional[float]:
    return lrm(trace, tuple(range(N_PRIORITIES)), house)


def lgr(trace: Trace) -> Optional[float]:
    """Total generation over total demand, from realized energies."""
    gen = math.fsum(rec.e_gen for rec in trace.records)
    dem = math.fsum(rec.e_dem for rec in trace.records)
    if dem == 0.0:
        return None
    return gen / dem


def timing_summary(
    step_ms: Optional[Sequence[float]],
) -> tuple[Optional[float], Optional[float], Optional[float]]:
    """(mean, p95, max) per-step wall time in milliseconds."""
    if not step_ms:
        return None, None, None
    ordered = sorted(step_ms)
    n = len(ordered)
    p95 = ordered[min(n - 1, max(0, math.ceil(0.95 * n) - 1))]
    return math.fsum(ordered) / n, p95, ordered[-1]


@dataclass
class MetricsReport:
    scenario_name: str
    controller: str
    grid_mode: str
    startup_mode: str
    horizon_steps: int
    n_houses: int
    trm_h: Optional[float]
    trm_deviation_degc: Optional[float]
    lrm_cri: Optional[float]
    lrm_o: Optional[float]
    lgr: Optional[float]
    served_steps: int
    blackout_steps: int
    per_house_trm: tuple[Optional[float], ...]
    per_house_lrm_cri: tuple[Optional[float], ...]
    per_house_lrm_o: tuple[Optional[float], ...]
    mean_step_ms: Optional[float]
    p95_step_ms: Optional[float]
    max_step_ms: Optional[float]
    flags: list[str] = field(default_factory=list)


def _per_house_trm(trace: Trace) -> tuple[Optional[float], ...]:
    bands = trace.house_bands()
    out = []
    for h in range(trace.n_houses):
        lo, hi = bands[h]
        hits = sum(
            1 for rec in trace.records if lo <= rec.t_house[h] <= hi
        )
        out.append(hits / len(trace.records) if trace.records else None)
    return tuple(out)


def compute_report(trace: Trace) -> MetricsReport:
    sc = trace.scenario
    flags: list[str] = []
    v_lrm_cri = lrm_critical(trace)
    v_lrm_o = lrm_overall(trace)
    v_lgr = lgr(trace)
    if v_lrm_cri is None:
        flags.append("lrm_cri undefined: no critical demand")
    if v_lrm_o is None:
        flags.append("lrm_o undefined: no demand")
    if v_lgr is None:
        flags.append("lgr undefined: no demand")
    mean_ms, p95_ms, max_ms = timing_summary(trace.step_ms)
    served = sum(1 for r in trace.records if r.served)
    return MetricsReport(
        scenario_name=sc.name,
        controller=sc.controller.value,
        grid_mode=sc.grid_mode.value,
        startup_mode=sc.startup_mode.value,
        horizon_steps=sc.horizon_steps,
        n_houses=sc.n_houses,
        trm_h=trm_thermal(trace),
        trm_deviation_degc=trm_deviation_degc(trace),
        lrm_cri=v_lrm_cri,
        lrm_o=v_lrm_o,
        lgr=v_lgr,
        served_steps=served,
        blackout_steps=len(trace.records) - served,
        per_house_trm=_per_house_trm(trace),
        per_house_lrm_cri=tuple(
            lrm_critical(trace, h) for h in range(trace.n_houses)
        ),
        per_house_lrm_o=tuple(
            lrm_overall(trace, h) for h in range(trace.n_houses)
        ),
        mean_step_ms=mean_ms,
        p95_step_ms=p95_ms,
        max_step_ms=max_ms,
        flags=flags,
    )
