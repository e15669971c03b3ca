"""Potential functions evaluated on grids, plus finite-difference gradients.

Four kinds are supported:

* ``double_well_sine`` -- V(x) = 0.5*(x^2 - 2)^2 + amp*sin(3x), amp default 0.3.
  With amp = 0 the potential is even and the wells sit exactly at +/-sqrt(2).
* ``harmonic``         -- V(x) = 0.5*k*x^2.
* ``reward_slice``     -- the negated x1-section of the benchmark reward,
  shifted per grid so its minimum over the grid is 0 (the Boltzmann weights
  downstream are shift-invariant; the shift only avoids underflow).
* ``tabulated``        -- linear interpolation of (x, V) pairs, loadable from
  a two-column CSV.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NumericError
from .grids import Grid1D

DEFAULT_FD_STEP = 1e-3  # central-difference step in domain units


class PotentialKind(Enum):
    DOUBLE_WELL_SINE = "double_well_sine"
    HARMONIC = "harmonic"
    REWARD_SLICE = "reward_slice"
    TABULATED = "tabulated"


def reward_profile(x1):
    """x1-section of the benchmark reward: two Gaussian peaks (8 at -1.5,
    15 at +1.5) separated by a depth-5 barrier at 0."""
    x1 = np.asarray(x1, dtype=float)
    return (8.0 * np.exp(-((x1 + 1.5) ** 2) / 0.32)
            + 15.0 * np.exp(-((x1 - 1.5) ** 2) / 0.32)
            - 5.0 * np.exp(-(x1 ** 2) / 0.18))


@dataclass(frozen=True)
class Potential:
    kind: PotentialKind
    params: tuple = ()
    table_x: np.ndarray | None = None
    table_v: np.ndarray | None = None

    @classmethod
    def double_well_sine(cls, sine_amp: float = 0.3) -> "Potential":
        return cls(PotentialKind.DOUBLE_WELL_SINE, (float(sine_amp),))

    @classmethod
    def harmonic(cls, stiffness: float = 1.0) -> "Potential":
        return cls(PotentialKind.HARMONIC, (float(stiffness),))

    @classmethod
    def reward_slice(cls) -> "Potential":
        return cls(PotentialKind.REWARD_SLICE)

    @classmethod
    def tabulated(cls, xs, vs) -> "Potential":
        xs = np.asarray(xs, dtype=float)
        vs = np.asarray(vs, dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
            raise ValueError("tabulated potential needs matching 1D x/V columns")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("tabulated x values must be strictly increasing")
        return cls(PotentialKind.TABULATED, (), xs, vs)

    @classmethod
    def from_csv(cls, path) -> "Potential":
        """Two-column CSV (x, V); a non-numeric first row is treated as header."""
        xs, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                try:
                    x, v = float(row[0]), float(row[1])
                except ValueError:
                    continue
                xs.append(x)
                vs.append(v)
        return cls.tabulated(xs, vs)

    def __call__(self, x):
        """Raw pointwise evaluation (no per-grid shift for reward_slice)."""
        x = np.asarray(x, dtype=float)
        if self.kind is PotentialKind.DOUBLE_WELL_SINE:
            (amp,) = self.params
            return 0.5 * (x * x - 2.0) ** 2 + amp * np.sin(3.0 * x)
        if self.kind is PotentialKind.HARMONIC:
            (k,) = self.params
            return 0.5 * k * x * x
        if self.kind is PotentialKind.REWARD_SLICE:
            return -reward_profile(x)
        return np.interp(x, self.table_x, self.table_v)


def potential_from_spec(spec: dict) -> Potential:
    """Build a potential from a config mapping: {"kind": ..., "params": [...]}
    or {"kind": "tabulated", "csv": path}."""
    kind = PotentialKind(spec["kind"])
    if kind is PotentialKind.TABULATED:
        if "csv" in spec:
            return Potential.from_csv(spec["csv"])
        return Potential.tabulated(spec["x"], spec["v"])
    params = tuple(spec.get("params", ()))
    if kind is PotentialKind.DOUBLE_WELL_SINE:
        return Potential.double_well_sine(*params) if params else Potential.double_well_sine()
    if kind is PotentialKind.HARMONIC:
        return Potential.harmonic(*params) if params else Potential.harmonic()
    return Potential.reward_slice()


def eval_potential(p: Potential, g: Grid1D) -> np.ndarray:
    """Evaluate p on every grid point; reward_slice is shifted to min 0."""
    v = np.asarray(p(g.points), dtype=float)
    if not np.all(np.isfinite(v)):
        bad = int(np.flatnonzero(~np.isfinite(v))[0])
        raise NumericError(f"non-finite potential value at grid index {bad}")
    if p.kind is PotentialKind.REWARD_SLICE:
        v = v - v.min()
    return v


def gradient_fd(p: Potential, x: float, h_fd: float = DEFAULT_FD_STEP) -> float:
    """Central difference (V(x+h) - V(x-h)) / 2h."""
    if h_fd <= 0:
        raise ValueError(f"h_fd must be positive, got {h_fd}")
    return float((p(x + h_fd) - p(x - h_fd)) / (2.0 * h_fd))
