"""Temperature-annealed, quantum-inspired amplitude estimation of the
Fokker-Planck stationary density on a grid.

The estimator prepares Boltzmann amplitudes a_i ~ exp(-beta_j * V_i / 2) for a
rising schedule of inverse temperatures beta_j, applies a fixed number of
reflect-about-the-mean steps (clamping negative amplitudes to zero and
renormalising after each), accumulates the squared amplitudes over the
schedule, and normalises the accumulated mass to 1.

The reflect-clamp step is an involution up to the clamp: applied twice it
returns near the original profile, applied once it swaps above-mean and
below-mean cells. The iterate therefore settles into a 2-cycle, and only an
even iteration count leaves the estimate on the phase whose peaks coincide
with the low-potential wells; odd counts return the inverted phase with mass
piled on the barrier. The default ``grover_iters`` is consequently even.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericError
from .grids import Grid1D
from .potentials import Potential, eval_potential


@dataclass(frozen=True)
class QaeConfig:
    """Knobs of the annealed estimator."""

    beta: float = 1.5                  # final inverse temperature
    n_qubits: int = 7                  # grid resolution used by callers
    grover_iters: int = 4              # reflect-clamp steps per stage; keep even
    anneal_steps: int = 6              # stages in the temperature schedule
    anneal_start_fraction: float = 0.3

    def __post_init__(self):
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.grover_iters < 0:
            raise ConfigError("grover_iters must be >= 0")
        if self.anneal_steps < 1:
            raise ConfigError("anneal_steps must be >= 1")
        if not (0.0 < self.anneal_start_fraction <= 1.0):
            raise ConfigError("anneal_start_fraction must be in (0, 1]")

    def schedule(self) -> np.ndarray:
        return np.linspace(self.anneal_start_fraction * self.beta, self.beta,
                           self.anneal_steps)


@dataclass(frozen=True)
class AmplitudeVector:
    """Nonnegative unit-L2-norm amplitude vector."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = self.values
        if np.any(v < 0):
            raise ValueError("amplitudes must be nonnegative")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"amplitude norm {norm!r} not within 1e-9 of 1")


@dataclass(frozen=True)
class DensityEstimate:
    """Probability mass on a Grid1D (sums to 1)."""

    grid: Grid1D
    mass: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.mass
        if m.shape != (self.grid.size,):
            raise ValueError("mass length must match grid size")
        if np.any(m < 0):
            raise ValueError("mass must be nonnegative")
        total = m.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"mass sums to {total!r}, not 1 within 1e-9")

    def mass_at(self, x) -> np.ndarray:
        """Nearest-cell mass lookup, clipped to the domain."""
        return self.mass[self.grid.nearest_index(x)]

    def density(self) -> np.ndarray:
        """Mass per unit length (mass / h)."""
        return self.mass / self.grid.spacing_h


def prepare_amplitudes(v_values, beta: float) -> AmplitudeVector:
    """Unit-norm amplitudes proportional to exp(-beta*V/2).

    min(V) is subtracted before exponentiating; the normalised output is
    invariant to the shift and it prevents an all-zero underflow for large
    beta*V.
    """
    v = np.asarray(v_values, dtype=float)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise NumericError("potential values must be finite and nonempty")
    w = np.exp(-beta * (v - v.min()) / 2.0)
    norm = np.linalg.norm(w)
    if norm == 0.0 or not np.isfinite(norm):
        raise NumericError("all amplitude weights underflowed to zero")
    return AmplitudeVector(w / norm)


def _reflect_clamp(values: np.ndarray) -> np.ndarray:
    """One reflection about the mean with clamp-to-zero and renormalisation.

    Falls back to the uniform vector in the degenerate all-zero case (not
    reachable from a valid nonnegative unit vector, kept as a guard)."""
    r = np.maximum(2.0 * values.mean() - values, 0.0)
    norm = np.linalg.norm(r)
    if norm == 0.0:
        return np.full_like(values, values.size ** -0.5)
    return r / norm


def grover_step(a: AmplitudeVector) -> AmplitudeVector:
    """normalize(clamp(2*mean(a) - a, 0)); uniform vectors are fixed points."""
    return AmplitudeVector(_reflect_clamp(a.values))


def annealed_qae(p: Potential, g: Grid1D, cfg: QaeConfig) -> DensityEstimate:
    """Run the annealed estimator for potential p on grid g.

    Squared amplitudes are accumulated with equal weight across the
    temperature schedule, then normalised to total mass 1.
    """
    v = eval_potential(p, g)
    acc = np.zeros_like(v)
    for beta_i in cfg.schedule():
        a = prepare_amplitudes(v, beta_i).values
        for _ in range(cfg.grover_iters):
            a = _reflect_clamp(a)
        acc += a * a
    return DensityEstimate(grid=g, mass=acc / acc.sum())
