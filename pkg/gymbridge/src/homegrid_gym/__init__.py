"""Gymnasium-compatible binding for the homegrid community simulator.

With gymnasium installed the environment registers as ``HomeGrid-v0``;
without it the same class works standalone through an API-compatible
fallback (see homegrid_gym._spaces).
"""

from ._spaces import HAS_GYMNASIUM, Box
from .env import HomeGridEnv
from .parity import assert_parity, parity_check

__all__ = [
    "HomeGridEnv",
    "parity_check",
    "assert_parity",
    "HAS_GYMNASIUM",
    "Box",
]

__version__ = "0.1.0"

if HAS_GYMNASIUM:  # pragma: no cover - exercised only with gymnasium
    from gymnasium.envs.registration import register

    try:
        register(id="HomeGrid-v0", entry_point="homegrid_gym.env:HomeGridEnv")
    except Exception:
        pass  # already registered in this process
