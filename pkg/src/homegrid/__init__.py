"""Discrete-time simulation of residential communities with rooftop PV,
batteries, air conditioners, and eight-level prioritized loads, islanded or
grid-backed, with bundled controllers and resiliency metrics."""

from .scenario import (
    BatteryParams,
    ControllerKind,
    DefaultParameters,
    DerClass,
    FileSource,
    GridMode,
    HouseConfig,
    PvParams,
    ScenarioConfig,
    ScenarioError,
    StartupMode,
    StartupParams,
    SynthSpec,
    SyntheticSource,
    ThermalParams,
    ThermostatParams,
    community_scenario,
    default_parameters,
    load_scenario,
    make_house,
    save_scenario,
    scenario_digest,
    single_house_scenario,
)
from .data import (
    CircuitMapping,
    DataError,
    LoadSeries,
    WeatherSeries,
    default_circuit_mapping,
    load_loads_csv,
    load_weather_csv,
    synth_disturbances,
)
from .devices import (
    DeviceEnergies,
    battery_step,
    house_energies,
    module_temperature,
    pv_output,
    pv_potential,
    thermal_step,
)
from .grid import (
    CommunityBalance,
    FeasibilityOutcome,
    Reason,
    Verdict,
    community_balance,
    resolve_step,
    shave_offgrid_surplus,
    startup_mismatch,
)
from .controllers import (
    ActionVector,
    ControllerInput,
    HouseView,
    baseline_step,
    decide,
    max_charge_dispatch,
    priority_stack,
    rule_based_step,
    thermostat,
)
from .engine import (
    ActionField,
    Engine,
    EngineError,
    ObsSlot,
    StepRecord,
    Trace,
    action_schema,
    default_reward,
    observation_schema,
    run_episode,
)
from .metrics import (
    MetricsReport,
    compute_report,
    lgr,
    lrm,
    lrm_critical,
    lrm_overall,
    trm_deviation_degc,
    trm_thermal,
)

__version__ = "0.1.0"
