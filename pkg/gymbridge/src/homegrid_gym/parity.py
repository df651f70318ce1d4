"""Replay equivalence between the wrapper and the raw engine.

Drives both with the identical action sequence (the bundled per-house
policy, round-tripped through the wrapper's flat encoding) and reports the
worst relative disagreement in observations and rewards. The wrapper adds
nothing to the physics, so the expected error is exactly zero; the check
guards the action codec and any protocol drift.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from homegrid import (
    ControllerKind,
    Engine,
    ScenarioConfig,
    baseline_step,
    community_scenario,
    observation_schema,
)

from .env import HomeGridEnv

__all__ = ["parity_check", "assert_parity"]


def _slot_errs(got: np.ndarray, want: np.ndarray) -> np.ndarray:
    want = np.asarray(want, dtype=np.float64)
    got = np.asarray(got, dtype=np.float64)
    return np.abs(got - want) / np.maximum(1.0, np.abs(want))


def parity_check(
    scenario: Optional[ScenarioConfig] = None,
    seed: int = 0,
    steps: Optional[int] = None,
    perturb: Optional[Callable[[int, np.ndarray], np.ndarray]] = None,
) -> dict:
    """Run the replay and report worst and first disagreement.

    perturb, when given, rewrites the wrapper-side flat action at each
    step; it exists so the detector itself can be exercised. The report
    carries the first mismatching step and slot (step -1 marks the reset
    observation) or first_mismatch=None for a clean replay.
    """
    if scenario is None:
        scenario = community_scenario(controller=ControllerKind.EXTERNAL)
    env = HomeGridEnv(scenario)
    eng = Engine(scenario)
    slot_names = [s.name for s in observation_schema(scenario)]

    obs_err = 0.0
    reward_err = 0.0
    first = None

    def note_obs(step: int, got: np.ndarray, want: np.ndarray) -> None:
        nonlocal obs_err, first
        errs = _slot_errs(got, want)
        worst = int(np.argmax(errs))
        obs_err = max(obs_err, float(errs[worst]))
        if first is None and errs[worst] > 0.0:
            first = {
                "step": step,
                "slot": slot_names[worst],
                "err": float(errs[worst]),
            }

    obs_env, _ = env.reset(seed=seed)
    obs_raw = eng.reset(seed)
    note_obs(-1, obs_env, obs_raw)

    n = steps if steps is not None else scenario.horizon_steps
    done = 0
    for k in range(n):
        actions = baseline_step(eng.controller_input())
        flat = env.encode(actions)
        if perturb is not None:
            flat = perturb(k, flat)
        obs_env, r_env, term_env, trunc_env, _ = env.step(flat)
        obs_raw, r_raw, term_raw, trunc_raw, _ = eng.step(actions)
        note_obs(k, obs_env, obs_raw)
        r_gap = abs(r_env - r_raw) / max(1.0, abs(r_raw))
        reward_err = max(reward_err, r_gap)
        if first is None and r_gap > 0.0:
            first = {"step": k, "slot": "reward", "err": r_gap}
        if (term_env, trunc_env) != (term_raw, trunc_raw):
            raise AssertionError(
                f"episode framing diverged at step {k}: "
                f"env=({term_env}, {trunc_env}) engine=({term_raw}, {trunc_raw})"
            )
        done += 1
        if trunc_env or term_env:
            break
    return {
        "steps": done,
        "max_obs_rel_err": obs_err,
        "max_reward_rel_err": reward_err,
        "first_mismatch": first,
    }


def assert_parity(
    scenario: Optional[ScenarioConfig] = None,
    seed: int = 0,
    steps: Optional[int] = None,
    tol: float = 1e-12,
    perturb: Optional[Callable[[int, np.ndarray], np.ndarray]] = None,
) -> dict:
    report = parity_check(scenario, seed, steps, perturb)
    worst = max(report["max_obs_rel_err"], report["max_reward_rel_err"])
    if worst > tol:
        raise AssertionError(f"replay diverged: {report}")
    return report
