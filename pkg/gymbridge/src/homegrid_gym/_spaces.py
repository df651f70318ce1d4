"""Space and Env primitives.

When gymnasium is installed its classes are used directly, so the wrapper
registers and type-checks as a regular gymnasium environment. Without it, a
minimal stand-in with the same constructor and method surface keeps the
wrapper importable and testable; only Box spaces are provided because the
wrapper uses nothing else.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised only where gymnasium is installed
    import gymnasium as _gym

    HAS_GYMNASIUM = True
    Env = _gym.Env
    Box = _gym.spaces.Box
except ImportError:
    HAS_GYMNASIUM = False

    class Box:  # type: ignore[no-redef]
        """Axis-aligned box of float values, closed on both ends."""

        def __init__(self, low, high, shape=None, dtype=np.float64, seed=None):
            self.dtype = np.dtype(dtype)
            low = np.asarray(low, dtype=self.dtype)
            high = np.asarray(high, dtype=self.dtype)
            if shape is not None:
                low = np.broadcast_to(low, shape).astype(self.dtype)
                high = np.broadcast_to(high, shape).astype(self.dtype)
            if low.shape != high.shape:
                raise ValueError(
                    f"low and high shapes differ: {low.shape} vs {high.shape}"
                )
            if np.any(low > high):
                raise ValueError("low must not exceed high")
            self.low = low.copy()
            self.high = high.copy()
            self._rng = np.random.default_rng(seed)

        @property
        def shape(self) -> tuple[int, ...]:
            return self.low.shape

        def seed(self, seed=None):
            self._rng = np.random.default_rng(seed)
            return [seed]

        def sample(self) -> np.ndarray:
            out = np.empty(self.shape, dtype=np.float64)
            lo_f = np.isfinite(self.low)
            hi_f = np.isfinite(self.high)
            both = lo_f & hi_f
            out[both] = self._rng.uniform(self.low[both], self.high[both])
            only_lo = lo_f & ~hi_f
            out[only_lo] = self.low[only_lo] + self._rng.exponential(
                size=int(only_lo.sum())
            )
            only_hi = ~lo_f & hi_f
            out[only_hi] = self.high[only_hi] - self._rng.exponential(
                size=int(only_hi.sum())
            )
            neither = ~lo_f & ~hi_f
            out[neither] = self._rng.normal(size=int(neither.sum()))
            return out.astype(self.dtype)

        def contains(self, x) -> bool:
            arr = np.asarray(x, dtype=self.dtype)
            return (
                arr.shape == self.shape
                and bool(np.all(arr >= self.low))
                and bool(np.all(arr <= self.high))
            )

        def __repr__(self) -> str:
            return f"Box({self.low.min()}, {self.high.max()}, {self.shape})"

    class Env:  # type: ignore[no-redef]
        """Method surface of a gymnasium environment."""

        metadata: dict = {"render_modes": []}
        render_mode = None
        spec = None
        observation_space: Box
        action_space: Box

        def reset(self, *, seed=None, options=None):
            raise NotImplementedError

        def step(self, action):
            raise NotImplementedError

        def render(self):
            return None

        def close(self):
            return None

        @property
        def unwrapped(self):
            return self
