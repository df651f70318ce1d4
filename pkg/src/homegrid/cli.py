"""Command-line front end.

Subcommands:
  run    one episode; writes trace, metrics, per-device CSVs and figures
  sweep  the standard 25-case comparison matrix (or a custom one)
  bench  per-step timing for a scenario over repeated episodes
  synth  write synthetic weather and load CSVs for offline use

Exit codes: 0 success, 2 bad inputs or usage, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .data import DataError, save_loads_csv, save_weather_csv, synth_disturbances
from .engine import EngineError, run_episode
from .metrics import compute_report, timing_summary
from .report import (
    metrics_row,
    write_device_csvs,
    write_metrics_text,
    write_summary_csv,
    write_trace_csv,
)
from .scenario import (
    ControllerKind,
    DerClass,
    GridMode,
    ScenarioConfig,
    ScenarioError,
    StartupMode,
    SynthSpec,
    SyntheticSource,
    FileSource,
    community_scenario,
    load_scenario,
    single_house_scenario,
)

__all__ = ["main", "standard_matrix", "run_case"]

_CONFIG_KEYS = ("community", "pv_and_battery", "battery_only", "pv_only", "no_der")

_GRID = {"off": GridMode.OFF_GRID, "on": GridMode.ON_GRID}
_CONTROLLER = {
    "baseline": ControllerKind.BASELINE,
    "rulebased": ControllerKind.RULE_BASED,
}
_STARTUP = {"wacsc": StartupMode.WACSC, "woacsc": StartupMode.WOACSC}


def _build_config(
    config_key: str,
    grid_mode: GridMode,
    controller: ControllerKind,
    startup_mode: StartupMode,
    seed: Optional[int],
    days: int,
    name: Optional[str] = None,
) -> ScenarioConfig:
    spec = SynthSpec(days=days)
    dist = SyntheticSource(spec=spec, seed=seed)
    horizon = int(round(days * 24.0 * 6))
    label = name or config_key
    if config_key == "community":
        return community_scenario(
            label,
            grid_mode=grid_mode,
            controller=controller,
            startup_mode=startup_mode,
            disturbances=dist,
            horizon_steps=horizon,
        )
    if config_key not in _CONFIG_KEYS:
        raise ScenarioError(
            f"unknown configuration {config_key!r}; expected one of {_CONFIG_KEYS}"
        )
    return single_house_scenario(
        DerClass(config_key),
        label,
        grid_mode=grid_mode,
        controller=controller,
        startup_mode=startup_mode,
        disturbances=dist,
        horizon_steps=horizon,
    )


def standard_matrix() -> list[dict[str, str]]:
    """The 25-case comparison: five configurations, four islanded
    controller/start-up combinations plus the grid-backed baseline."""
    kinds = [
        ("off", "baseline", "wacsc"),
        ("off", "baseline", "woacsc"),
        ("off", "rulebased", "wacsc"),
        ("off", "rulebased", "woacsc"),
        ("on", "baseline", "woacsc"),
    ]
    cases = []
    for config in _CONFIG_KEYS:
        for grid, controller, startup in kinds:
            name = f"{config}_{grid}_{controller}"
            if grid == "off":
                name += f"_{startup}"
            cases.append(
                {
                    "name": name,
                    "config": config,
                    "grid": grid,
                    "controller": controller,
                    "startup": startup,
                }
            )
    return cases


def run_case(
    case: dict[str, str],
    seed: Optional[int],
    days: int,
    outdir: Optional[str],
    figures: bool,
) -> dict[str, str]:
    """Run one matrix case and write its outputs; returns the summary row.

    Module-level so a process pool can dispatch it.
    """
    cfg = _build_config(
        case["config"],
        _GRID[case["grid"]],
        _CONTROLLER[case["controller"]],
        _STARTUP[case["startup"]],
        seed,
        days,
        name=case["name"],
    )
    trace = run_episode(cfg, seed)
    report = compute_report(trace)
    if outdir is not None:
        case_dir = Path(outdir) / case["name"]
        case_dir.mkdir(parents=True, exist_ok=True)
        write_trace_csv(trace, case_dir / "trace.csv")
        write_metrics_text(report, case_dir / "metrics.txt")
        if figures:
            from .plots import render_episode_figures

            render_episode_figures(trace, case_dir)
    return metrics_row(report)


def _fmt_cell(value: str) -> str:
    try:
        return f"{float(value):.4f}"
    except ValueError:
        return value if value else "n/a"


def _print_summary(rows: list[dict[str, str]]) -> None:
    cols = ["scenario", "controller", "grid_mode", "startup_mode",
            "trm_h", "lrm_cri", "lrm_o", "lgr"]
    if any(row.get("status", "ok") != "ok" for row in rows):
        cols.append("status")
    widths = {c: len(c) for c in cols}
    printable = []
    for row in rows:
        cells = {c: _fmt_cell(row.get(c, "")) for c in cols}
        printable.append(cells)
        for c in cols:
            widths[c] = max(widths[c], len(cells[c]))
    header = "  ".join(c.ljust(widths[c]) for c in cols)
    print(header)
    print("-" * len(header))
    for cells in printable:
        print("  ".join(cells[c].ljust(widths[c]) for c in cols))


# ---------------------------------------------------------------------------
# subcommands


def _apply_disturbance_flags(
    cfg: ScenarioConfig, args: argparse.Namespace
) -> ScenarioConfig:
    """Swap the scenario's disturbance source per --synth/--weather/--loads."""
    wants_files = args.weather is not None or args.loads
    if args.synth and wants_files:
        raise ScenarioError("--synth cannot be combined with --weather/--loads")
    if args.synth:
        return replace(
            cfg, disturbances=SyntheticSource(spec=SynthSpec(days=args.days))
        )
    if not wants_files:
        return cfg
    if args.weather is None:
        raise ScenarioError("--loads requires --weather")
    if not args.loads:
        raise ScenarioError("--weather requires --loads")
    if not Path(args.weather).exists():
        raise ScenarioError(f"weather file not found: {args.weather}")
    for lp in args.loads:
        if not Path(lp).exists():
            raise ScenarioError(f"load file not found: {lp}")
    if args.circuit_map is not None and not Path(args.circuit_map).exists():
        raise ScenarioError(f"circuit map file not found: {args.circuit_map}")
    return replace(
        cfg,
        disturbances=FileSource(
            weather_path=args.weather,
            load_paths=tuple(args.loads),
            circuit_map_path=args.circuit_map,
        ),
    )


def _resolve_scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.scenario is not None:
        cfg = load_scenario(args.scenario)
        # explicit flags override what the file says
        changes = {}
        if args.grid_set:
            changes["grid_mode"] = _GRID[args.grid]
        if args.controller_set:
            changes["controller"] = _CONTROLLER[args.controller]
        if args.startup_set:
            changes["startup_mode"] = _STARTUP[args.startup]
        if changes:
            cfg = replace(cfg, **changes)
            cfg.validate()
    else:
        cfg = _build_config(
            args.config,
            _GRID[args.grid],
            _CONTROLLER[args.controller],
            _STARTUP[args.startup],
            args.seed,
            args.days,
        )
    return _apply_disturbance_flags(cfg, args)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _resolve_scenario(args)
    trace = run_episode(cfg, args.seed)
    report = compute_report(trace)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [write_trace_csv(trace, outdir / "trace.csv")]
    written.append(write_metrics_text(report, outdir / "metrics.txt"))
    written.append(write_summary_csv([metrics_row(report)], outdir / "metrics.csv"))
    written.extend(write_device_csvs(trace, outdir))
    if not args.no_figures:
        from .plots import render_episode_figures

        written.extend(render_episode_figures(trace, outdir))
    _print_summary([metrics_row(report)])
    print(f"\nwrote {len(written)} files to {outdir}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.matrix is not None:
        import yaml

        raw = yaml.safe_load(Path(args.matrix).read_text())
        if not isinstance(raw, list):
            raise ScenarioError("matrix file must hold a list of cases")
        cases = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict) or "config" not in item:
                raise ScenarioError(f"matrix case {i} must be a mapping with 'config'")
            grid = item.get("grid", "off")
            if isinstance(grid, bool):  # YAML reads a bare on/off as boolean
                grid = "on" if grid else "off"
            grid = str(grid)
            controller = str(item.get("controller", "baseline"))
            startup = str(item.get("startup", "wacsc"))
            for val, allowed, fname in (
                (grid, _GRID, "grid"),
                (controller, _CONTROLLER, "controller"),
                (startup, _STARTUP, "startup"),
            ):
                if val not in allowed:
                    raise ScenarioError(
                        f"matrix case {i}: {fname} must be one of "
                        f"{sorted(allowed)}, got {val!r}"
                    )
            cases.append(
                {
                    "name": str(item.get("name", f"case{i}")),
                    "config": str(item["config"]),
                    "grid": grid,
                    "controller": controller,
                    "startup": startup,
                }
            )
    else:
        cases = standard_matrix()

    outdir = args.out
    Path(outdir).mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    rows = []
    failures: list[tuple[str, str]] = []

    def settle(case: dict[str, str], result) -> None:
        # one bad case must not kill the rest of the matrix; it keeps its
        # summary row, marked failed
        try:
            rows.append(result())
        except Exception as exc:
            failures.append((case["name"], str(exc)))
            rows.append(
                {
                    "scenario": case["name"],
                    "controller": case["controller"],
                    "grid_mode": _GRID[case["grid"]].value,
                    "startup_mode": case["startup"],
                    "status": f"failed: {exc}",
                }
            )

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(
                    run_case, case, args.seed, args.days, outdir, args.figures
                )
                for case in cases
            ]
            for case, fut in zip(cases, futures):
                settle(case, fut.result)
    else:
        for case in cases:
            settle(
                case,
                lambda c=case: run_case(
                    c, args.seed, args.days, outdir, args.figures
                ),
            )
    elapsed = time.perf_counter() - t0
    write_summary_csv(rows, Path(outdir) / "summary.csv")
    _print_summary(rows)
    print(f"\n{len(cases)} cases in {elapsed:.1f} s; summary in {outdir}/summary.csv")
    if failures:
        lines = [f"{name}: {msg}" for name, msg in failures]
        (Path(outdir) / "failures.txt").write_text("\n".join(lines) + "\n")
        for line in lines:
            print(f"case failed: {line}", file=sys.stderr)
        return 1
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.reps < 3:
        print("error: bench needs at least 3 repetitions", file=sys.stderr)
        return 2
    cfg = _resolve_scenario(args)
    run_episode(cfg, args.seed)  # warm-up
    all_ms: list[float] = []
    for rep in range(args.reps):
        trace = run_episode(cfg, args.seed)
        assert trace.step_ms is not None
        mean, p95, mx = timing_summary(trace.step_ms)
        all_ms.extend(trace.step_ms)
        print(
            f"episode {rep + 1}: mean={mean:.4f} ms  p95={p95:.4f} ms  "
            f"max={mx:.4f} ms"
        )
    mean, p95, mx = timing_summary(all_ms)
    print(
        f"overall ({len(all_ms)} steps): mean={mean:.4f} ms  "
        f"p95={p95:.4f} ms  max={mx:.4f} ms"
    )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = SynthSpec(days=args.days)
    weather, loads = synth_disturbances(spec, args.houses, 1.0 / 6.0, args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    wpath = outdir / "weather.csv"
    save_weather_csv(weather, wpath)
    paths = [wpath]
    for h in range(args.houses):
        lpath = outdir / f"loads_house{h}.csv"
        save_loads_csv(loads, lpath, house=h, start=weather.start)
        paths.append(lpath)
    for p in paths:
        print(p)
    return 0


# ---------------------------------------------------------------------------


def _add_common_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--config",
        choices=_CONFIG_KEYS,
        default="community",
        help="stock configuration when no scenario file is given",
    )
    p.add_argument("--grid", choices=sorted(_GRID), default="off")
    p.add_argument("--controller", choices=sorted(_CONTROLLER), default="baseline")
    p.add_argument("--startup", choices=sorted(_STARTUP), default="wacsc")
    p.add_argument("--days", type=int, default=7, help="synthetic horizon in days")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weather", help="weather CSV replacing the scenario source")
    p.add_argument(
        "--loads",
        action="append",
        metavar="CSV",
        help="load CSV; repeat for one per house, give once to share",
    )
    p.add_argument("--circuit-map", help="circuit-to-priority mapping YAML")
    p.add_argument(
        "--synth",
        action="store_true",
        help="force the seeded synthetic source, ignoring file sources",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homegrid",
        description="Residential community energy simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one episode and write its outputs")
    p_run.add_argument("--scenario", help="scenario YAML file")
    _add_common_scenario_flags(p_run)
    p_run.add_argument("--out", default="homegrid_out")
    p_run.add_argument(
        "--no-figures", action="store_true", help="skip PNG rendering"
    )
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the standard comparison matrix")
    p_sweep.add_argument("--matrix", help="custom matrix YAML (list of cases)")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--days", type=int, default=7)
    p_sweep.add_argument("--out", default="homegrid_sweep")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument(
        "--figures", action="store_true", help="also render PNGs per case"
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_bench = sub.add_parser("bench", help="time the simulation loop")
    p_bench.add_argument("--scenario", help="scenario YAML file")
    _add_common_scenario_flags(p_bench)
    p_bench.set_defaults(controller="rulebased")
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.set_defaults(func=cmd_bench)

    p_synth = sub.add_parser("synth", help="write synthetic disturbance CSVs")
    p_synth.add_argument("--out", default="homegrid_synth")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--days", type=int, default=7)
    p_synth.add_argument("--houses", type=int, default=1)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    # track explicit overrides for scenario files
    given = set()
    for tok in argv:
        if tok.startswith("--"):
            given.add(tok.split("=", 1)[0][2:])
    args.grid_set = "grid" in given
    args.controller_set = "controller" in given
    args.startup_set = "startup" in given
    try:
        return args.func(args)
    except (ScenarioError, DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
