"""Command-line front end: subcommands, outputs, exit codes."""

import pytest

from homegrid.cli import main, run_case, standard_matrix
from homegrid.scenario import (
    GridMode,
    load_scenario,
    save_scenario,
    single_house_scenario,
    DerClass,
    SyntheticSource,
    SynthSpec,
)

RUN_FILES = [
    "trace.csv",
    "metrics.txt",
    "metrics.csv",
    "pv.csv",
    "battery.csv",
    "temperature.csv",
    "loads.csv",
    "generation.csv",
]
FIGURES = ["pv.png", "battery.png", "temperature.png", "loads.png", "generation.png"]


def short_scenario(tmp_path, **kwargs):
    cfg = single_house_scenario(
        DerClass.PV_AND_BATTERY,
        "short",
        disturbances=SyntheticSource(spec=SynthSpec(days=1)),
        horizon_steps=24,
        **kwargs,
    )
    path = tmp_path / "scenario.yaml"
    save_scenario(cfg, path)
    return path


class TestRun:
    def test_writes_all_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            [
                "run",
                "--scenario",
                str(short_scenario(tmp_path)),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        for name in RUN_FILES + FIGURES:
            assert (out / name).exists(), name
        text = capsys.readouterr().out
        assert "trm_h" in text
        assert "short" in text

    def test_no_figures_flag(self, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "run",
                "--scenario",
                str(short_scenario(tmp_path)),
                "--no-figures",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        for name in RUN_FILES:
            assert (out / name).exists(), name
        for name in FIGURES:
            assert not (out / name).exists(), name

    def test_stock_config_without_file(self, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "run",
                "--config",
                "no_der",
                "--grid",
                "on",
                "--days",
                "1",
                "--no-figures",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert (out / "trace.csv").exists()

    def test_missing_scenario_file(self, tmp_path, capsys):
        code = main(["run", "--scenario", str(tmp_path / "nope.yaml")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_malformed_scenario_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("houses: [\n")
        code = main(["run", "--scenario", str(bad)])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_flag_overrides_scenario_file(self, tmp_path):
        out = tmp_path / "out"
        path = short_scenario(tmp_path, grid_mode=GridMode.OFF_GRID)
        code = main(
            [
                "run",
                "--scenario",
                str(path),
                "--grid",
                "on",
                "--no-figures",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        text = (out / "metrics.txt").read_text()
        assert "on_grid" in text

    def test_invalid_override_combination(self, tmp_path, capsys):
        path = short_scenario(tmp_path)
        # rule-based control is islanded-only, so forcing on-grid must fail
        code = main(
            [
                "run",
                "--scenario",
                str(path),
                "--grid",
                "on",
                "--controller",
                "rulebased",
                "--no-figures",
            ]
        )
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestSweep:
    def test_standard_matrix_shape(self):
        cases = standard_matrix()
        assert len(cases) == 25
        names = [c["name"] for c in cases]
        assert "community_off_baseline_wacsc" in names
        assert "community_on_baseline" in names
        assert len(set(names)) == 25

    def test_run_case_without_outputs(self):
        row = run_case(standard_matrix()[0], seed=0, days=1, outdir=None, figures=False)
        assert row["scenario"] == "community_off_baseline_wacsc"
        assert "trm_h" in row

    def test_custom_matrix(self, tmp_path, capsys):
        matrix = tmp_path / "matrix.yaml"
        matrix.write_text(
            "- {name: a, config: no_der, grid: on}\n"
            "- {name: b, config: pv_only, grid: off, controller: rulebased}\n"
        )
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--matrix",
                str(matrix),
                "--days",
                "1",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert (out / "summary.csv").exists()
        assert (out / "a" / "trace.csv").exists()
        assert (out / "b" / "metrics.txt").exists()
        # figures are opt-in for sweeps
        assert not (out / "a" / "pv.png").exists()
        assert "2 cases" in capsys.readouterr().out

    def test_parallel_jobs(self, tmp_path):
        matrix = tmp_path / "matrix.yaml"
        matrix.write_text(
            "- {name: a, config: no_der, grid: on}\n"
            "- {name: b, config: no_der, grid: off}\n"
        )
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--matrix",
                str(matrix),
                "--days",
                "1",
                "--jobs",
                "2",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert (out / "summary.csv").exists()

    def test_failing_case_does_not_kill_the_sweep(self, tmp_path, capsys):
        matrix = tmp_path / "matrix.yaml"
        # rulebased on-grid passes field checks but fails scenario validation
        matrix.write_text(
            "- {name: ok, config: no_der, grid: off}\n"
            "- {name: bad, config: community, grid: on, controller: rulebased}\n"
            "- {name: also_ok, config: pv_only, grid: on}\n"
        )
        out = tmp_path / "sweep"
        code = main(
            ["sweep", "--matrix", str(matrix), "--days", "1", "--out", str(out)]
        )
        assert code == 1
        # survivors still ran and reported
        assert (out / "ok" / "trace.csv").exists()
        assert (out / "also_ok" / "trace.csv").exists()
        # every case keeps its summary row, the broken one marked failed
        lines = (out / "summary.csv").read_text().strip().split("\n")
        assert len(lines) == 4
        assert lines[2].startswith("bad,")
        assert "failed:" in lines[2]
        assert lines[1].endswith(",ok") and lines[3].endswith(",ok")
        # the failure is recorded, named, and explained
        failures = (out / "failures.txt").read_text()
        assert failures.startswith("bad: ")
        assert "off_grid" in failures
        assert "case failed: bad" in capsys.readouterr().err

    def test_failing_case_reported_under_jobs(self, tmp_path, capsys):
        matrix = tmp_path / "matrix.yaml"
        matrix.write_text(
            "- {name: ok, config: no_der, grid: off}\n"
            "- {name: bad, config: community, grid: on, controller: rulebased}\n"
        )
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--matrix",
                str(matrix),
                "--days",
                "1",
                "--jobs",
                "2",
                "--out",
                str(out),
            ]
        )
        assert code == 1
        assert (out / "ok" / "trace.csv").exists()
        assert "bad" in (out / "failures.txt").read_text()

    def test_bad_matrix_entries(self, tmp_path, capsys):
        matrix = tmp_path / "matrix.yaml"
        matrix.write_text("- {name: a, config: no_der, grid: sideways}\n")
        code = main(["sweep", "--matrix", str(matrix), "--out", str(tmp_path / "s")])
        assert code == 2
        assert "case 0" in capsys.readouterr().err

    def test_matrix_must_be_a_list(self, tmp_path, capsys):
        matrix = tmp_path / "matrix.yaml"
        matrix.write_text("config: no_der\n")
        code = main(["sweep", "--matrix", str(matrix), "--out", str(tmp_path / "s")])
        assert code == 2


class TestRunWithFiles:
    def test_run_feeds_from_weather_and_load_files(self, tmp_path):
        data = tmp_path / "data"
        assert (
            main(
                [
                    "synth",
                    "--out",
                    str(data),
                    "--days",
                    "1",
                    "--houses",
                    "1",
                    "--seed",
                    "9",
                ]
            )
            == 0
        )
        out = tmp_path / "run"
        # one loads file shared across all four houses
        code = main(
            [
                "run",
                "--config",
                "community",
                "--grid",
                "on",
                "--weather",
                str(data / "weather.csv"),
                "--loads",
                str(data / "loads_house0.csv"),
                "--days",
                "1",
                "--seed",
                "9",
                "--out",
                str(out),
                "--no-figures",
            ]
        )
        assert code == 0
        assert (out / "trace.csv").exists()
        assert sum(1 for _ in (out / "trace.csv").open()) == 145

    def test_missing_weather_file_named(self, tmp_path, capsys):
        code = main(
            [
                "run",
                "--config",
                "no_der",
                "--weather",
                str(tmp_path / "nope.csv"),
                "--loads",
                str(tmp_path / "also_nope.csv"),
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 2
        assert "weather file not found" in capsys.readouterr().err

    def test_synth_flag_excludes_file_flags(self, tmp_path, capsys):
        code = main(
            [
                "run",
                "--synth",
                "--weather",
                "w.csv",
                "--loads",
                "l.csv",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 2
        assert "--synth cannot be combined" in capsys.readouterr().err

    def test_loads_need_weather_and_back(self, tmp_path, capsys):
        code = main(["run", "--loads", "l.csv", "--out", str(tmp_path / "o")])
        assert code == 2
        assert "requires --weather" in capsys.readouterr().err
        code = main(["run", "--weather", "w.csv", "--out", str(tmp_path / "o")])
        assert code == 2
        assert "requires --loads" in capsys.readouterr().err

    def test_synth_flag_runs_without_external_data(self, tmp_path):
        out = tmp_path / "o"
        code = main(
            [
                "run",
                "--config",
                "no_der",
                "--synth",
                "--days",
                "1",
                "--seed",
                "7",
                "--out",
                str(out),
                "--no-figures",
            ]
        )
        assert code == 0
        assert (out / "metrics.txt").exists()


class TestBench:
    def test_rejects_too_few_reps(self, capsys):
        code = main(["bench", "--reps", "2"])
        assert code == 2
        assert "3 repetitions" in capsys.readouterr().err

    def test_reports_timings(self, capsys):
        code = main(
            ["bench", "--config", "no_der", "--days", "1", "--reps", "3"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "episode 3" in out
        assert "overall" in out
        assert "mean=" in out


class TestSynth:
    def test_writes_weather_and_per_house_loads(self, tmp_path, capsys):
        out = tmp_path / "synth"
        code = main(
            [
                "synth",
                "--out",
                str(out),
                "--days",
                "1",
                "--houses",
                "2",
                "--seed",
                "3",
            ]
        )
        assert code == 0
        assert (out / "weather.csv").exists()
        assert (out / "loads_house0.csv").exists()
        assert (out / "loads_house1.csv").exists()
        printed = capsys.readouterr().out
        assert "weather.csv" in printed

    def test_synth_output_feeds_file_scenario(self, tmp_path):
        out = tmp_path / "synth"
        assert main(["synth", "--out", str(out), "--days", "1"]) == 0
        from homegrid.data import load_loads_csv, load_weather_csv

        ws = load_weather_csv(out / "weather.csv", 1.0 / 6.0)
        ls = load_loads_csv(out / "loads_house0.csv", 1.0 / 6.0)
        assert len(ws) == 144
        assert ls.energies.shape[0] == 144

    def test_deterministic(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(["synth", "--out", str(a), "--days", "1", "--seed", "7"]) == 0
        assert main(["synth", "--out", str(b), "--days", "1", "--seed", "7"]) == 0
        assert (a / "weather.csv").read_bytes() == (b / "weather.csv").read_bytes()
        assert (
            a / "loads_house0.csv"
        ).read_bytes() == (b / "loads_house0.csv").read_bytes()


def test_scenario_round_trip_through_cli_file(tmp_path):
    path = short_scenario(tmp_path)
    cfg = load_scenario(path)
    assert cfg.name == "short"
    assert cfg.horizon_steps == 24
