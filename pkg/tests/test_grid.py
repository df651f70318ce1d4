"""Community balance, start-up surge, and feasibility resolution."""

import math

import pytest
from hypothesis import given, strategies as st

from homegrid.devices import DeviceEnergies
from homegrid.grid import (
    SERVE_TOL_KW,
    SERVE_TOL_KWH,
    Reason,
    Verdict,
    community_balance,
    resolve_step,
    shave_offgrid_surplus,
    startup_flags,
    startup_mismatch,
)
from homegrid.scenario import GridMode, StartupMode

DT = 1.0 / 6.0


def energies(e_pv=0.0, e_bat_c=0.0, e_bat_d=0.0, e_ac=0.0, loads=0.0):
    row = (loads / 8.0,) * 8
    return DeviceEnergies(
        e_pv_potential=e_pv,
        e_pv=e_pv,
        e_bat_c=e_bat_c,
        e_bat_d=e_bat_d,
        e_ac=e_ac,
        e_loads=row,
        e_load_total=loads,
    )


class TestBalance:
    def test_sums_generation_and_demand(self):
        b = community_balance(
            [energies(e_pv=1.0, e_bat_d=0.2), energies(e_ac=0.5, loads=0.3)],
            GridMode.OFF_GRID,
        )
        assert b.e_gen == pytest.approx(1.2)
        assert b.e_dem == pytest.approx(0.8)
        assert b.e_mis == pytest.approx(0.4)

    def test_charging_counts_as_demand(self):
        b = community_balance([energies(e_pv=1.0, e_bat_c=0.4)], GridMode.OFF_GRID)
        assert b.e_dem == pytest.approx(0.4)
        assert b.e_mis == pytest.approx(0.6)


class TestStartup:
    def test_flags_exhaustive(self):
        # only the off->on transition surges
        assert startup_flags((0,), (0,)) == (0,)
        assert startup_flags((1,), (0,)) == (1,)
        assert startup_flags((0,), (1,)) == (0,)
        assert startup_flags((1,), (1,)) == (0,)

    def test_mismatch_reference(self):
        # 1 kWh in a 10-minute step is 6 kW of generation against a
        # 10.5 kW surge
        p_mis = startup_mismatch(1.0, (1,), (0,), 10.5, DT)
        assert p_mis == pytest.approx(-4.5, abs=1e-12)

    def test_no_starts_no_surge(self):
        assert startup_mismatch(1.0, (1,), (1,), 10.5, DT) == pytest.approx(6.0)

    def test_per_house_surge_values(self):
        p_mis = startup_mismatch(0.0, (1, 1), (0, 0), (10.5, 6.3), DT)
        assert p_mis == pytest.approx(-16.8)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            startup_flags((1, 0), (0,))
        with pytest.raises(ValueError):
            startup_mismatch(1.0, (1, 1), (0, 0), (10.5,), DT)


class TestResolve:
    def test_on_grid_always_serves(self):
        out = resolve_step(-5.0, -100.0, GridMode.ON_GRID, StartupMode.WACSC)
        assert out.verdict is Verdict.SERVE_ALL
        assert out.reason is Reason.ON_GRID

    def test_energy_deficit_blacks_out(self):
        out = resolve_step(-0.1, 10.0, GridMode.OFF_GRID, StartupMode.WOACSC)
        assert out.verdict is Verdict.SERVE_NONE
        assert out.reason is Reason.ENERGY_DEFICIT

    def test_startup_deficit_blacks_out_only_with_constraint(self):
        wacsc = resolve_step(0.5, -0.1, GridMode.OFF_GRID, StartupMode.WACSC)
        woacsc = resolve_step(0.5, -0.1, GridMode.OFF_GRID, StartupMode.WOACSC)
        assert wacsc.verdict is Verdict.SERVE_NONE
        assert wacsc.reason is Reason.STARTUP_DEFICIT
        assert woacsc.verdict is Verdict.SERVE_ALL

    def test_feasible_serves(self):
        out = resolve_step(0.0, 0.0, GridMode.OFF_GRID, StartupMode.WACSC)
        assert out.verdict is Verdict.SERVE_ALL
        assert out.reason is Reason.FEASIBLE

    def test_rounding_slack_still_serves(self):
        # load-matched PV can land an ulp short; that is not a deficit
        out = resolve_step(-1e-12, -1e-12, GridMode.OFF_GRID, StartupMode.WACSC)
        assert out.verdict is Verdict.SERVE_ALL

    @given(
        e_mis=st.floats(-10, 10, allow_nan=False),
        p_mis=st.floats(-50, 50, allow_nan=False),
    )
    def test_startup_constraint_only_restricts(self, e_mis, p_mis):
        # anything served under the surge constraint is served without it
        wacsc = resolve_step(e_mis, p_mis, GridMode.OFF_GRID, StartupMode.WACSC)
        woacsc = resolve_step(e_mis, p_mis, GridMode.OFF_GRID, StartupMode.WOACSC)
        if wacsc.verdict is Verdict.SERVE_ALL:
            assert woacsc.verdict is Verdict.SERVE_ALL


class TestShave:
    def test_deficit_untouched(self):
        rows = [energies(e_pv=0.5, loads=1.0)]
        out = shave_offgrid_surplus(rows)
        assert out[0].e_pv == 0.5

    def test_pv_trimmed_from_last_house_first(self):
        rows = [energies(e_pv=1.0), energies(e_pv=1.0, loads=1.5)]
        out = shave_offgrid_surplus(rows)
        # surplus 0.5 comes out of house 1's array first
        assert out[1].e_pv == pytest.approx(0.5)
        assert out[0].e_pv == 1.0
        gen = sum(e.generation for e in out)
        dem = sum(e.demand for e in out)
        assert gen == pytest.approx(dem, abs=1e-12)

    def test_discharge_trimmed_after_pv(self):
        rows = [energies(e_pv=0.2, e_bat_d=1.0, loads=0.6)]
        out = shave_offgrid_surplus(rows)
        assert out[0].e_pv == 0.0
        assert out[0].e_bat_d == pytest.approx(0.6)

    def test_demand_never_modified(self):
        rows = [energies(e_pv=2.0, e_bat_c=0.3, e_ac=0.5, loads=0.4)]
        out = shave_offgrid_surplus(rows)
        assert out[0].e_bat_c == 0.3
        assert out[0].e_ac == 0.5
        assert out[0].e_load_total == 0.4

    @given(
        pv=st.lists(st.floats(0, 5), min_size=1, max_size=4),
        discharge=st.lists(st.floats(0, 3), min_size=1, max_size=4),
        demand=st.floats(0, 10),
    )
    def test_balances_whenever_generation_covers_demand(
        self, pv, discharge, demand
    ):
        n = min(len(pv), len(discharge))
        rows = [energies(e_pv=pv[i], e_bat_d=discharge[i]) for i in range(n)]
        rows.append(energies(loads=demand))
        gen = sum(e.generation for e in rows)
        if gen < demand:
            return
        out = shave_offgrid_surplus(rows)
        gen2 = math.fsum(e.generation for e in out)
        dem2 = math.fsum(e.demand for e in out)
        assert abs(gen2 - dem2) <= 1e-9
        for before, after in zip(rows, out):
            assert after.e_pv <= before.e_pv + 1e-15
            assert after.e_bat_d <= before.e_bat_d + 1e-15


def test_serve_tolerances_are_tight():
    assert SERVE_TOL_KWH == 1e-9
    assert SERVE_TOL_KW == 1e-9
