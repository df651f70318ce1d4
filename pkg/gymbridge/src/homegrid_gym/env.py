"""RL environment over the community simulation engine.

Observations are the engine's flat vector, bounded by its observation
schema. Actions are one flat float vector in [0, 1] whose layout is
generated from the engine's action schema: for every house, in schema
order, one slot each for the AC switch, the mode selector, the PV
setpoint, the charge and discharge commands, then eight load switches.

Decoding makes any point of the action box legal for the engine: values
are clipped to [0, 1], binary slots snap at 0.5, the mode slot maps onto
{-1, +1}, slots for hardware the house does not own are zeroed, and a
simultaneous charge/discharge command keeps only the larger side
(discharge on a tie).
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from homegrid import (
    ActionVector,
    ControllerKind,
    Engine,
    ScenarioConfig,
    action_schema,
    community_scenario,
    load_scenario,
    observation_schema,
)

from ._spaces import HAS_GYMNASIUM, Box, Env

__all__ = ["HomeGridEnv"]

ScenarioLike = Union[ScenarioConfig, str, Path, None]


def _resolve_scenario(scenario: ScenarioLike) -> ScenarioConfig:
    if scenario is None:
        return community_scenario(controller=ControllerKind.EXTERNAL)
    if isinstance(scenario, (str, Path)):
        return load_scenario(scenario)
    return scenario


class HomeGridEnv(Env):
    """Flat-vector environment around one simulation scenario."""

    metadata = {"render_modes": []}

    def __init__(self, scenario: ScenarioLike = None, *, reward_fn=None):
        self.scenario = _resolve_scenario(scenario)
        self._engine = Engine(self.scenario, reward_fn=reward_fn)
        self._house_ids = [h.house_id for h in self.scenario.houses]

        slots = observation_schema(self.scenario)
        low = np.array([s.low for s in slots], dtype=np.float64)
        high = np.array([s.high for s in slots], dtype=np.float64)
        self.observation_space = Box(low=low, high=high, dtype=np.float64)

        self._layout = []
        start = 0
        for field in action_schema(self.scenario):
            self._layout.append((field, start))
            start += field.size
        self._n_action = start
        self.action_space = Box(
            low=0.0, high=1.0, shape=(start,), dtype=np.float64
        )

    @property
    def engine(self) -> Engine:
        return self._engine

    @property
    def horizon(self) -> int:
        return self._engine.horizon

    # -- protocol ------------------------------------------------------------

    def reset(self, *, seed: Optional[int] = None, options=None):
        if HAS_GYMNASIUM:
            super().reset(seed=seed)
        obs = self._engine.reset(seed)
        info = {"step": 0, "horizon": self._engine.horizon}
        return obs, info

    def step(self, action):
        decoded = self.decode(action)
        obs, reward, terminated, truncated, record = self._engine.step(decoded)
        info = {
            "step": record.step,
            "verdict": record.verdict.value,
            "reason": record.reason.value,
            "e_grid_kwh": record.e_grid,
            "served": record.served,
            "record": record,
        }
        return obs, float(reward), bool(terminated), bool(truncated), info

    def render(self):
        return None

    def close(self):
        return None

    # -- action codec ----------------------------------------------------------

    def decode(self, action) -> list[ActionVector]:
        """Project one point of the action box onto legal engine commands."""
        arr = np.asarray(action, dtype=np.float64).reshape(-1)
        if arr.shape != (self._n_action,):
            raise ValueError(
                f"action must have {self._n_action} entries, got {arr.shape[0]}"
            )
        arr = np.clip(arr, 0.0, 1.0)
        per_house: dict[int, dict] = {hid: {} for hid in self._house_ids}
        for field, start in self._layout:
            vals = arr[start : start + field.size]
            slot = per_house[field.house_id]
            if field.field == "u_ac":
                slot["u_ac"] = 1 if vals[0] >= 0.5 else 0
            elif field.field == "u_mode":
                slot["u_mode"] = 1 if vals[0] >= 0.5 else -1
            elif field.field == "u_pv":
                slot["u_pv"] = float(vals[0]) if field.enabled else 0.0
            elif field.field == "c":
                slot["c"] = float(vals[0]) if field.enabled else 0.0
            elif field.field == "d":
                slot["d"] = float(vals[0]) if field.enabled else 0.0
            else:  # u_loads
                slot["u_loads"] = tuple(1 if v >= 0.5 else 0 for v in vals)
        out = []
        for hid in self._house_ids:
            slot = per_house[hid]
            c, d = slot["c"], slot["d"]
            if c > 0.0 and d > 0.0:
                if c > d:
                    d = 0.0
                else:
                    c = 0.0
            out.append(
                ActionVector(
                    u_ac=slot["u_ac"],
                    u_mode=slot["u_mode"],
                    u_pv=slot["u_pv"],
                    c=c,
                    d=d,
                    u_loads=slot["u_loads"],
                )
            )
        return out

    def encode(self, actions: Sequence[ActionVector]) -> np.ndarray:
        """Inverse of decode for engine-legal action vectors."""
        if len(actions) != len(self._house_ids):
            raise ValueError(
                f"expected {len(self._house_ids)} action vectors, "
                f"got {len(actions)}"
            )
        by_id = dict(zip(self._house_ids, actions))
        arr = np.zeros(self._n_action, dtype=np.float64)
        for field, start in self._layout:
            a = by_id[field.house_id]
            if field.field == "u_ac":
                arr[start] = float(a.u_ac)
            elif field.field == "u_mode":
                arr[start] = 1.0 if a.u_mode > 0 else 0.0
            elif field.field == "u_pv":
                arr[start] = a.u_pv
            elif field.field == "c":
                arr[start] = a.c
            elif field.field == "d":
                arr[start] = a.d
            else:
                arr[start : start + field.size] = [float(u) for u in a.u_loads]
        return arr
