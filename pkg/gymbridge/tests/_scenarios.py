"""Small fast scenarios shared by the binding tests."""

from __future__ import annotations

from homegrid import (
    ControllerKind,
    DerClass,
    GridMode,
    SyntheticSource,
    SynthSpec,
    community_scenario,
    single_house_scenario,
)


def short_community(
    horizon_steps: int = 36, grid_mode: GridMode = GridMode.OFF_GRID
):
    return community_scenario(
        grid_mode=grid_mode,
        controller=ControllerKind.EXTERNAL,
        disturbances=SyntheticSource(spec=SynthSpec(days=1)),
        horizon_steps=horizon_steps,
    )


def short_single(der: DerClass = DerClass.PV_AND_BATTERY, horizon_steps: int = 36):
    return single_house_scenario(
        der,
        controller=ControllerKind.EXTERNAL,
        disturbances=SyntheticSource(spec=SynthSpec(days=1)),
        horizon_steps=horizon_steps,
    )
