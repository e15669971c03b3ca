"""Derived quantities: smoothing, entropy, divergences, coverage, run
summaries and power-law fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qae import DensityEstimate

KL_FLOOR = 1e-12
GAUSSIAN_ENTROPY_CONST = 0.5 * math.log(2.0 * math.pi * math.e)
FINAL_WINDOW = 80  # episodes entering the summary statistics


@dataclass
class RunArtifacts:
    """Per-episode records of one training run plus its identifying config."""

    agent: str
    seed: int
    env_reward: np.ndarray          # total environment reward per episode
    bonus: np.ndarray               # total exploration bonus per episode
    mean_entropy: np.ndarray        # mean policy entropy per episode (nats)
    discovery_fraction: np.ndarray  # fraction of steps at the global optimum
    config: dict = field(default_factory=dict)
    visited_x1: np.ndarray | None = None   # x1 samples from the final episodes

    @property
    def episodes(self) -> int:
        return len(self.env_reward)


@dataclass(frozen=True)
class RunSummary:
    agent: str
    seed: int
    mean_reward: float
    std_reward: float
    peak_reward: float
    global_rate: float
    sample_efficiency: float

    def as_dict(self) -> dict:
        return {"agent": self.agent, "seed": self.seed,
                "mean_reward": self.mean_reward, "std_reward": self.std_reward,
                "peak_reward": self.peak_reward, "global_rate": self.global_rate,
                "sample_efficiency": self.sample_efficiency}


def smooth(series, window: int = 25) -> np.ndarray:
    """Trailing moving average; the warm-up is the mean of the available
    prefix."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    x = np.asarray(series, dtype=float)
    if x.size == 0:
        return x.copy()
    csum = np.concatenate(([0.0], np.cumsum(x)))
    out = np.empty_like(x)
    for i in range(x.size):
        lo = max(0, i + 1 - window)
        out[i] = (csum[i + 1] - csum[lo]) / (i + 1 - lo)
    return out


def policy_entropy(log_sigma: float, m: int) -> float:
    """Differential entropy of an isotropic m-dim Gaussian policy, in nats."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return m * (GAUSSIAN_ENTROPY_CONST + log_sigma)


def _require_same_grid(p: DensityEstimate, q: DensityEstimate):
    if p.grid != q.grid:
        raise ValueError("density estimates live on different grids")


def kl_divergence(p: DensityEstimate, q: DensityEstimate) -> float:
    """sum_i p_i ln(p_i / max(q_i, floor)); zero-mass p cells contribute 0."""
    _require_same_grid(p, q)
    pm = p.mass
    qm = np.maximum(q.mass, KL_FLOOR)
    pos = pm > 0
    return float(np.sum(pm[pos] * np.log(pm[pos] / qm[pos])))


def mse(p: DensityEstimate, q: DensityEstimate) -> float:
    """Mean squared difference in density units (mass/h), so values are
    comparable across grid resolutions."""
    _require_same_grid(p, q)
    return float(np.mean((p.density() - q.density()) ** 2))


def coverage(p: DensityEstimate, tau: float) -> float:
    """Total mass of cells whose density (mass/h) strictly exceeds tau."""
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    return float(p.mass[p.density() > tau].sum())


def support_coverage(p: DensityEstimate, tau: float) -> float:
    """Fraction of the state space (grid cells) whose density exceeds tau.

    This is the coverage notion that rewards exploration: mass-weighted
    coverage is maximised by concentrating on few cells, whereas the cell
    fraction measures how much of the domain the density actually reaches.
    """
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    return float(np.mean(p.density() > tau))


def summarize_run(run: RunArtifacts) -> RunSummary:
    """Final-window mean/std of environment reward, all-time peak, final
    global-optimum rate and reward per environment step."""
    if run.episodes < FINAL_WINDOW:
        raise ValueError(f"need >= {FINAL_WINDOW} episodes, got {run.episodes}")
    tail = run.env_reward[-FINAL_WINDOW:]
    horizon = run.config.get("horizon", 1)
    return RunSummary(
        agent=run.agent, seed=run.seed,
        mean_reward=float(tail.mean()),
        std_reward=float(tail.std()),
        peak_reward=float(run.env_reward.max()),
        global_rate=float(run.discovery_fraction[-FINAL_WINDOW:].mean()),
        sample_efficiency=float(run.env_reward.sum() / (run.episodes * horizon)),
    )


def fit_power_law(xs, ys) -> float:
    """Least-squares exponent of y ~ c * x^e (slope of ln y on ln x)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 3:
        raise ValueError("need at least 3 points for a power-law fit")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("power-law fit requires strictly positive data")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def visitation_density(samples, grid) -> DensityEstimate:
    """Histogram of visited coordinates as a DensityEstimate on grid.
    Empty input yields the uniform density."""
    counts = np.zeros(grid.size)
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        return DensityEstimate(grid=grid, mass=np.full(grid.size, 1.0 / grid.size))
    idx = grid.nearest_index(samples)
    np.add.at(counts, idx, 1.0)
    return DensityEstimate(grid=grid, mass=counts / counts.sum())
