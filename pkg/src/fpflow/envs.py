"""Continuous-control benchmark with a two-mode reward landscape.

Dynamics: s' = decay*s + action_gain*a_padded + noise_scale*xi, xi ~ N(0, I).
Actions shorter than the state are zero-padded, so they drive the leading
coordinates.  Reward is evaluated on the post-transition state.  The reward
along x1 has a local peak of 8 at -1.5 and the global peak of 15 at +1.5,
separated by a barrier at 0; remaining coordinates incur a small quadratic
penalty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potentials import reward_profile

GLOBAL_OPTIMUM_X1 = 1.5
GLOBAL_OPTIMUM_TOL = 0.5
RESET_STD = 0.5  # reset draws s ~ N(0, 0.25*I)


@dataclass(frozen=True)
class EnvConfig:
    state_dim: int = 4
    action_dim: int = 2
    horizon: int = 200
    decay: float = 0.92
    action_gain: float = 0.15
    noise_scale: float = 0.08
    action_clip: float = 1.0

    def __post_init__(self):
        if self.state_dim < 1 or self.action_dim < 1 or self.horizon < 1:
            raise ValueError("state_dim, action_dim and horizon must be >= 1")
        for name in ("decay", "action_gain", "noise_scale", "action_clip"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass
class EnvState:
    s: np.ndarray
    step_index: int = 0


def reward_landscape(x) -> float:
    """Two-peak reward minus quadratic penalty on the trailing coordinates."""
    x = np.asarray(x, dtype=float)
    return float(reward_profile(x[0]) - 0.05 * np.dot(x[1:], x[1:]))


def is_global_optimum(state: EnvState) -> bool:
    """True iff |x1 - 1.5| < 0.5 (strict)."""
    return bool(abs(state.s[0] - GLOBAL_OPTIMUM_X1) < GLOBAL_OPTIMUM_TOL)


class MultimodalRewardEnv:
    """Single-threaded environment instance owning its RNG stream.

    reward_fn overrides the default landscape (used by the 1D control task);
    it receives the post-transition state vector.
    """

    def __init__(self, cfg: EnvConfig, rng=None, reward_fn=None):
        self.cfg = cfg
        # anything exposing standard_normal works (test stubs included)
        self._rng = rng if hasattr(rng, "standard_normal") \
            else np.random.default_rng(rng)
        self._reward_fn = reward_fn or reward_landscape
        self.state: EnvState | None = None

    def reset(self, seed=None) -> EnvState:
        """Draw s ~ N(0, 0.25*I); reseeds the stream when seed is given."""
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        s = RESET_STD * self._rng.standard_normal(self.cfg.state_dim)
        self.state = EnvState(s=s, step_index=0)
        return self.state

    def step(self, action):
        """Apply one transition; returns (EnvState, reward, done)."""
        if self.state is None:
            raise RuntimeError("call reset() before step()")
        cfg = self.cfg
        a = np.asarray(action, dtype=float)
        if a.shape != (cfg.action_dim,) or not np.all(np.isfinite(a)):
            raise ValueError(f"action must be a finite vector of length {cfg.action_dim}")
        a = np.clip(a, -cfg.action_clip, cfg.action_clip)
        padded = np.zeros(cfg.state_dim)
        padded[:cfg.action_dim] = a
        xi = self._rng.standard_normal(cfg.state_dim)
        s_next = cfg.decay * self.state.s + cfg.action_gain * padded + cfg.noise_scale * xi
        reward = float(self._reward_fn(s_next))
        self.state = EnvState(s=s_next, step_index=self.state.step_index + 1)
        done = self.state.step_index >= cfg.horizon
        return self.state, reward, done
