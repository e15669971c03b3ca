"""Uniform 1D/2D grids over bounded domains.

Grids are endpoint-inclusive (linspace semantics): a grid with ``n_qubits``
qubits has ``2**n_qubits`` points and spacing ``(upper - lower) / (2**n - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

N_QUBITS_MIN = 3
N_QUBITS_MAX = 12


@dataclass(frozen=True)
class Grid1D:
    """Uniform, endpoint-inclusive discretisation of [lower, upper]."""

    lower: float
    upper: float
    n_qubits: int
    points: np.ndarray = field(repr=False)
    spacing_h: float

    @property
    def size(self) -> int:
        return 2 ** self.n_qubits

    def nearest_index(self, x) -> np.ndarray:
        """Index of the grid cell closest to x (clipped to the domain)."""
        xi = np.clip(np.asarray(x, dtype=float), self.lower, self.upper)
        idx = np.rint((xi - self.lower) / self.spacing_h).astype(int)
        return np.clip(idx, 0, self.size - 1)


@dataclass(frozen=True)
class Grid2D:
    """Axis-aligned product of two 1D grids, points enumerated row-major
    (x1 index varies slowest)."""

    gx: Grid1D
    gy: Grid1D

    @property
    def size(self) -> int:
        return self.gx.size * self.gy.size

    def mesh(self):
        """Row-major flattened coordinate arrays (x1, x2)."""
        x1, x2 = np.meshgrid(self.gx.points, self.gy.points, indexing="ij")
        return x1.ravel(), x2.ravel()


def make_grid(lower: float, upper: float, n_qubits: int) -> Grid1D:
    """Build a Grid1D; bounds must be ordered and n_qubits in [3, 12]."""
    if not (lower < upper):
        raise ValueError(f"degenerate bounds: lower={lower} >= upper={upper}")
    if not (N_QUBITS_MIN <= n_qubits <= N_QUBITS_MAX):
        raise ConfigError(
            f"n_qubits={n_qubits} outside [{N_QUBITS_MIN}, {N_QUBITS_MAX}]")
    n = 2 ** n_qubits
    points = np.linspace(lower, upper, n)
    h = (upper - lower) / (n - 1)
    return Grid1D(lower=float(lower), upper=float(upper), n_qubits=int(n_qubits),
                  points=points, spacing_h=float(h))


def make_grid_2d(lower, upper, n_qubits) -> Grid2D:
    """Square product grid with identical axes."""
    g = make_grid(lower, upper, n_qubits)
    return Grid2D(gx=g, gy=g)
