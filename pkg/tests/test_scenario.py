"""Scenario defaults, validation messages, and YAML round-trips."""

import math

import pytest

from homegrid.scenario import (
    BatteryParams,
    ControllerKind,
    DerClass,
    GridMode,
    HouseConfig,
    ScenarioError,
    StartupMode,
    StartupParams,
    SynthSpec,
    ThermostatParams,
    community_scenario,
    default_parameters,
    load_scenario,
    make_house,
    save_scenario,
    scenario_digest,
    single_house_scenario,
)


class TestDefaults:
    def test_reference_bundle(self):
        p = default_parameters()
        assert p.dt_hours == pytest.approx(1.0 / 6.0)
        assert p.thermal.a == pytest.approx(0.9459594689067654, abs=1e-15)
        assert p.thermal.d == pytest.approx(1.0 - 0.9459594689067654, abs=1e-15)
        assert p.thermal.cop == 3.0
        assert p.thermal.p_ac_rated == 3.0
        assert p.pv.n_panels == 31
        assert p.pv.p_panel_rated == 0.325
        assert p.pv.gamma_pct_per_degc == -0.35
        assert p.pv.u0 == 25.0 and p.pv.u1 == 6.84
        assert p.battery.e_max == 13.5 and p.battery.e_min == 0.0
        assert p.battery.e_charge_cap == pytest.approx(5.0 / 6.0)
        assert p.battery.e_discharge_cap == pytest.approx(7.0 / 6.0)
        assert p.battery.eta_c == 0.95 and p.battery.eta_d == 0.95
        assert (p.thermostat.t_ac_low, p.thermostat.t_ac_high) == (23.0, 25.0)
        assert (p.thermostat.t_mode_low, p.thermostat.t_mode_high) == (18.0, 30.0)
        assert p.startup.alpha_v == 0.3 and p.startup.alpha_i == 5.0

    def test_retention_tracks_step_size(self):
        p = default_parameters(dt_hours=0.5)
        assert p.thermal.a == pytest.approx(math.exp(-0.5 / 3.0))
        assert p.battery.e_charge_cap == pytest.approx(2.5)

    def test_surge_power(self):
        p = default_parameters()
        assert p.startup.surge_kw(3.0) == pytest.approx(10.5)
        assert p.startup.surge_kw(2.0) == pytest.approx(7.0)


class TestHouseGating:
    def test_der_classes_carry_matching_gear(self):
        pv_bat = make_house(0, DerClass.PV_AND_BATTERY)
        assert pv_bat.pv is not None and pv_bat.battery is not None
        bat = make_house(1, DerClass.BATTERY_ONLY)
        assert bat.pv is None and bat.battery is not None
        pv = make_house(2, DerClass.PV_ONLY)
        assert pv.pv is not None and pv.battery is None
        bare = make_house(3, DerClass.NO_DER)
        assert bare.pv is None and bare.battery is None

    def test_initial_battery_defaults_to_midpoint(self):
        h = make_house(0, DerClass.PV_AND_BATTERY)
        assert h.start_e_bat() == pytest.approx(6.75)
        h2 = make_house(0, DerClass.PV_AND_BATTERY, initial_e_bat=2.0)
        assert h2.start_e_bat() == 2.0
        assert make_house(0, DerClass.NO_DER).start_e_bat() == 0.0

    def test_unexpected_gear_rejected(self):
        p = default_parameters()
        bad = HouseConfig(
            house_id=0,
            der=DerClass.NO_DER,
            thermal=p.thermal,
            thermostat=p.thermostat,
            pv=p.pv,
        )
        with pytest.raises(ScenarioError, match="pv must be absent"):
            bad.validate()

    def test_initial_charge_outside_envelope_rejected(self):
        p = default_parameters()
        bad = HouseConfig(
            house_id=0,
            der=DerClass.BATTERY_ONLY,
            thermal=p.thermal,
            thermostat=p.thermostat,
            battery=p.battery,
            initial_e_bat=14.0,
        )
        with pytest.raises(ScenarioError, match="initial_e_bat"):
            bad.validate()


class TestValidation:
    def test_thermostat_band_order(self):
        with pytest.raises(ScenarioError, match="t_ac_low < t_ac_high"):
            ThermostatParams(t_ac_low=25.0, t_ac_high=23.0).validate()

    def test_ac_band_inside_mode_band(self):
        with pytest.raises(ScenarioError, match="inside the mode band"):
            ThermostatParams(
                t_ac_low=17.0, t_ac_high=25.0, t_mode_low=18.0, t_mode_high=30.0
            ).validate()

    def test_battery_envelope_order(self):
        with pytest.raises(ScenarioError, match="e_min < e_max"):
            BatteryParams(
                e_max=1.0, e_min=2.0, e_charge_cap=1.0, e_discharge_cap=1.0
            ).validate()

    def test_rule_based_requires_island(self):
        with pytest.raises(ScenarioError, match="off_grid"):
            community_scenario(
                grid_mode=GridMode.ON_GRID, controller=ControllerKind.RULE_BASED
            )

    def test_duplicate_house_ids_rejected(self):
        houses = (make_house(0, DerClass.NO_DER), make_house(0, DerClass.NO_DER))
        cfg = community_scenario()
        bad = type(cfg)(
            name="dup",
            houses=houses,
            grid_mode=cfg.grid_mode,
            controller=cfg.controller,
            startup_mode=cfg.startup_mode,
            startup=cfg.startup,
            disturbances=cfg.disturbances,
        )
        with pytest.raises(ScenarioError, match="unique ascending"):
            bad.validate()

    def test_surge_multipliers_bounded(self):
        with pytest.raises(ScenarioError, match="alpha_v"):
            StartupParams(alpha_v=1.0).validate()
        with pytest.raises(ScenarioError, match=r"alpha_i must lie in \[3, 8\]"):
            StartupParams(alpha_i=2.0).validate()
        with pytest.raises(ScenarioError, match="alpha_i"):
            StartupParams(alpha_i=9.0).validate()
        StartupParams(alpha_i=3.0).validate()
        StartupParams(alpha_i=8.0).validate()

    def test_synth_spec_bounds(self):
        with pytest.raises(ScenarioError, match="days"):
            SynthSpec(days=0).validate()
        with pytest.raises(ScenarioError, match="load_means_kw"):
            SynthSpec(load_means_kw=(0.1, 0.2)).validate()

    def test_positive_step_and_horizon(self):
        cfg = community_scenario()
        import dataclasses

        with pytest.raises(ScenarioError, match="dt_hours"):
            dataclasses.replace(cfg, dt_hours=0.0).validate()
        with pytest.raises(ScenarioError, match="horizon_steps"):
            dataclasses.replace(cfg, horizon_steps=0).validate()


class TestStockScenarios:
    def test_community_has_one_house_per_der_class(self):
        cfg = community_scenario()
        assert [h.der for h in cfg.houses] == [
            DerClass.PV_AND_BATTERY,
            DerClass.BATTERY_ONLY,
            DerClass.PV_ONLY,
            DerClass.NO_DER,
        ]
        assert cfg.horizon_steps == 1008
        assert cfg.dt_hours == pytest.approx(1.0 / 6.0)

    def test_single_house_config(self):
        cfg = single_house_scenario(DerClass.PV_ONLY, n_panels=6)
        assert cfg.n_houses == 1
        assert cfg.houses[0].pv is not None
        assert cfg.houses[0].pv.n_panels == 6


class TestYamlRoundTrip:
    def test_round_trip_preserves_everything(self, tmp_path):
        cfg = community_scenario(
            startup_mode=StartupMode.WOACSC,
            controller=ControllerKind.RULE_BASED,
        )
        path = tmp_path / "scenario.yaml"
        save_scenario(cfg, path)
        loaded = load_scenario(path)
        assert loaded == cfg
        assert scenario_digest(loaded) == scenario_digest(cfg)

    def test_digest_changes_with_content(self):
        a = community_scenario()
        b = community_scenario(startup_mode=StartupMode.WOACSC)
        assert scenario_digest(a) != scenario_digest(b)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="not found"):
            load_scenario(tmp_path / "nope.yaml")

    def test_parse_error(self, tmp_path):
        p = tmp_path / "bad.yaml"
        p.write_text("{unbalanced: [")
        with pytest.raises(ScenarioError, match="parse error"):
            load_scenario(p)

    def test_unknown_enum_value(self, tmp_path):
        cfg = community_scenario()
        path = tmp_path / "scenario.yaml"
        save_scenario(cfg, path)
        text = path.read_text().replace("grid_mode: off_grid", "grid_mode: islanded")
        path.write_text(text)
        with pytest.raises(ScenarioError, match="grid_mode must be one of"):
            load_scenario(path)

    def test_unknown_field_named_in_error(self, tmp_path):
        cfg = community_scenario()
        path = tmp_path / "scenario.yaml"
        save_scenario(cfg, path)
        text = path.read_text().replace("cop: 3.0", "cop: 3.0\n      warp: 9")
        path.write_text(text)
        with pytest.raises(ScenarioError, match="warp"):
            load_scenario(path)

    def test_missing_required_fields(self, tmp_path):
        p = tmp_path / "partial.yaml"
        p.write_text("name: x\n")
        with pytest.raises(ScenarioError, match="missing required"):
            load_scenario(p)
