"""Delimited output: per-step traces, per-device series, and metric
summaries.

Floats are written with repr so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

from .engine import Trace
from .metrics import MetricsReport
from .scenario import N_PRIORITIES

__all__ = [
    "write_trace_csv",
    "write_device_csvs",
    "write_metrics_text",
    "metrics_row",
    "write_summary_csv",
]


def _f(x: Optional[float]) -> str:
    if x is None:
        return ""
    return repr(float(x))


def write_trace_csv(trace: Trace, path: str | Path) -> Path:
    path = Path(path)
    n = trace.n_houses
    header = [
        "step", "time_h", "ghi_wm2", "t_ambient_c", "wind_ms",
        "verdict", "reason",
        "e_gen_kwh", "e_dem_kwh", "e_mis_kwh", "e_grid_kwh",
        "candidate_e_mis_kwh", "candidate_p_mis_ac_kw",
    ]
    for h in range(n):
        hid = trace.scenario.houses[h].house_id
        header += [
            f"house{hid}_t_c",
            f"house{hid}_e_bat_kwh",
            f"house{hid}_pv_potential_kwh",
            f"house{hid}_e_pv_kwh",
            f"house{hid}_e_bat_c_kwh",
            f"house{hid}_e_bat_d_kwh",
            f"house{hid}_e_ac_kwh",
            f"house{hid}_desired_kwh",
            f"house{hid}_served_kwh",
            f"house{hid}_u_ac",
            f"house{hid}_u_mode",
        ]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for rec in trace.records:
            row = [
                rec.step,
                _f(rec.step * trace.dt_hours),
                _f(rec.ghi_wm2),
                _f(rec.t_ambient_c),
                _f(rec.wind_ms),
                rec.verdict.value,
                rec.reason.value,
                _f(rec.e_gen),
                _f(rec.e_dem),
                _f(rec.e_mis),
                _f(rec.e_grid),
                _f(rec.candidate_e_mis),
                _f(rec.candidate_p_mis_ac),
            ]
            for h in range(n):
                e = rec.energies[h]
                row += [
                    _f(rec.t_house[h]),
                    _f(rec.e_bat[h]),
                    _f(e.e_pv_potential),
                    _f(e.e_pv),
                    _f(e.e_bat_c),
                    _f(e.e_bat_d),
                    _f(e.e_ac),
                    _f(sum(rec.desired[h])),
                    _f(e.e_load_total),
                    rec.realized[h].u_ac,
                    rec.realized[h].u_mode,
                ]
            w.writerow(row)
    return path


def write_device_csvs(trace: Trace, outdir: str | Path) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    n = trace.n_houses
    ids = [h.house_id for h in trace.scenario.houses]
    paths = []

    def _open(name: str):
        p = outdir / name
        paths.append(p)
        return p.open("w", newline="")

    with _open("pv.csv") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["step", "time_h"]
            + [f"house{i}_potential_kwh" for i in ids]
            + [f"house{i}_e_pv_kwh" for i in ids]
        )
        for rec in trace.records:
            w.writerow(
                [rec.step, _f(rec.step * trace.dt_hours)]
                + [_f(rec.energies[h].e_pv_potential) for h in range(n)]
                + [_f(rec.energies[h].e_pv) for h in range(n)]
            )

    with _open("battery.csv") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["step", "time_h"]
            + [f"house{i}_e_bat_kwh" for i in ids]
            + [f"house{i}_charge_kwh" for i in ids]
            + [f"house{i}_discharge_kwh" for i in ids]
        )
        for rec in trace.records:
            w.writerow(
                [rec.step, _f(rec.step * trace.dt_hours)]
                + [_f(rec.e_bat[h]) for h in range(n)]
                + [_f(rec.energies[h].e_bat_c) for h in range(n)]
                + [_f(rec.energies[h].e_bat_d) for h in range(n)]
            )

    with _open("temperature.csv") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["step", "time_h", "t_ambient_c"]
            + [f"house{i}_t_c" for i in ids]
        )
        for rec in trace.records:
            w.writerow(
                [rec.step, _f(rec.step * trace.dt_hours), _f(rec.t_ambient_c)]
                + [_f(rec.t_house[h]) for h in range(n)]
            )

    with _open("loads.csv") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["step", "time_h"]
            + [f"desired_p{j + 1}_kwh" for j in range(N_PRIORITIES)]
            + [f"served_p{j + 1}_kwh" for j in range(N_PRIORITIES)]
        )
        for rec in trace.records:
            desired = [
                sum(rec.desired[h][j] for h in range(n))
                for j in range(N_PRIORITIES)
            ]
            served = [
                sum(rec.energies[h].e_loads[j] for h in range(n))
                for j in range(N_PRIORITIES)
            ]
            w.writerow(
                [rec.step, _f(rec.step * trace.dt_hours)]
                + [_f(x) for x in desired]
                + [_f(x) for x in served]
            )

    with _open("generation.csv") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "step", "time_h", "e_gen_kwh", "e_dem_kwh", "e_mis_kwh",
                "e_grid_kwh", "verdict",
            ]
        )
        for rec in trace.records:
            w.writerow(
                [
                    rec.step,
                    _f(rec.step * trace.dt_hours),
                    _f(rec.e_gen),
                    _f(rec.e_dem),
                    _f(rec.e_mis),
                    _f(rec.e_grid),
                    rec.verdict.value,
                ]
            )

    return paths


def write_metrics_text(report: MetricsReport, path: str | Path) -> Path:
    path = Path(path)

    def fmt(x: Optional[float]) -> str:
        return "n/a" if x is None else f"{x:.6f}"

    lines = [
        f"scenario: {report.scenario_name}",
        f"controller: {report.controller}",
        f"grid_mode: {report.grid_mode}",
        f"startup_mode: {report.startup_mode}",
        f"horizon_steps: {report.horizon_steps}",
        f"houses: {report.n_houses}",
        f"trm_h: {fmt(report.trm_h)}",
        f"trm_deviation_degc: {fmt(report.trm_deviation_degc)}",
        f"lrm_cri: {fmt(report.lrm_cri)}",
        f"lrm_o: {fmt(report.lrm_o)}",
        f"lgr: {fmt(report.lgr)}",
        f"served_steps: {report.served_steps}",
        f"blackout_steps: {report.blackout_steps}",
    ]
    for h in range(report.n_houses):
        lines.append(
            f"house{h}: trm={fmt(report.per_house_trm[h])} "
            f"lrm_cri={fmt(report.per_house_lrm_cri[h])} "
            f"lrm_o={fmt(report.per_house_lrm_o[h])}"
        )
    # wall-time stats stay out so equal runs write equal files
    for flag in report.flags:
        lines.append(f"flag: {flag}")
    path.write_text("\n".join(lines) + "\n")
    return path


_SUMMARY_FIELDS = [
    "scenario", "controller", "grid_mode", "startup_mode",
    "trm_h", "lrm_cri", "lrm_o", "lgr",
    "served_steps", "blackout_steps", "mean_step_ms", "status",
]


def metrics_row(report: MetricsReport) -> dict[str, str]:
    return {
        "scenario": report.scenario_name,
        "controller": report.controller,
        "grid_mode": report.grid_mode,
        "startup_mode": report.startup_mode,
        "trm_h": _f(report.trm_h),
        "lrm_cri": _f(report.lrm_cri),
        "lrm_o": _f(report.lrm_o),
        "lgr": _f(report.lgr),
        "served_steps": str(report.served_steps),
        "blackout_steps": str(report.blackout_steps),
        "mean_step_ms": _f(report.mean_step_ms),
        "status": "ok",
    }


def write_summary_csv(rows: list[dict[str, str]], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=_SUMMARY_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow(row)
    return path
