"""Classical Fokker-Planck machinery: analytic stationary densities, explicit
finite-difference time evolution, and separable 2D fields.

The evolution solves  d(rho)/dt = -d/dx(f * rho) + D * d2/dx2(rho)  with
gradient drift f = -V' and zero-flux (reflecting) boundaries, in conservative
flux form.  Interface fluxes use exponential fitting (Scharfetter-Gummel
weights): F_{i+1/2} = (D/h) * [B(-z) rho_i - B(z) rho_{i+1}] with
z = f_mid*h/D and B the Bernoulli function z/(e^z - 1).  The scheme's
discrete fixed point is exactly the node Boltzmann density exp(-V/D), it
conserves mass to round-off, and with the time step used here every update
is a convex combination, so positivity is preserved.  Plain first-order
upwinding was tried first and rejected: its fixed point on the default
2^9 grid sits at L1 distance ~7e-2 from the Boltzmann density, outside the
5e-2 fidelity budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .grids import Grid1D, Grid2D
from .potentials import Potential, eval_potential, gradient_fd
from .qae import DensityEstimate

# propagator powering kicks in above this many steps per snapshot interval
_POWERING_THRESHOLD = 4096
_POWERING_MAX_N = 1024


@dataclass(frozen=True)
class EvolutionTrace:
    grid: Grid1D
    snapshots: list          # DensityEstimate per stored time
    dt: float
    times: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class Field2D:
    """Row-major scalar field on a product grid (x1 index varies slowest)."""

    grid: Grid2D
    values: np.ndarray = field(repr=False)

    def as_matrix(self) -> np.ndarray:
        return self.values.reshape(self.grid.gx.size, self.grid.gy.size)


@dataclass(frozen=True)
class VectorField2D:
    grid: Grid2D
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)


def stationary_analytic(p: Potential, d_coeff: float, g: Grid1D) -> DensityEstimate:
    """Normalised Boltzmann mass exp(-V/D) on the grid."""
    if d_coeff <= 0:
        raise ValueError(f"d_coeff must be positive, got {d_coeff}")
    v = eval_potential(p, g)
    w = np.exp(-(v - v.min()) / d_coeff)
    return DensityEstimate(grid=g, mass=w / w.sum())


def _bernoulli(z: np.ndarray) -> np.ndarray:
    """B(z) = z / (e^z - 1), continuous through z = 0."""
    out = np.empty_like(z)
    small = np.abs(z) < 1e-10
    out[small] = 1.0 - z[small] / 2.0
    zs = z[~small]
    out[~small] = zs / np.expm1(zs)
    return out


class _FluxStepper:
    """Explicit conservative update rho -> rho + dt * div(flux), mass form."""

    def __init__(self, p: Potential, d_coeff: float, g: Grid1D):
        v = eval_potential(p, g)
        h = g.spacing_h
        f_mid = -(v[1:] - v[:-1]) / h           # drift at cell interfaces
        z = f_mid * h / d_coeff
        self.h = h
        self.n = g.size
        # F_{i+1/2} = c_lo * dens_i - c_hi * dens_{i+1}
        self.c_lo = (d_coeff / h) * _bernoulli(-z)
        self.c_hi = (d_coeff / h) * _bernoulli(z)
        self.dt = 0.4 * h * h / (2.0 * d_coeff + np.abs(f_mid).max() * h)

    def step(self, mass: np.ndarray) -> np.ndarray:
        dens = mass / self.h
        flux = self.c_lo * dens[:-1] - self.c_hi * dens[1:]
        out = mass.copy()
        out[:-1] -= self.dt * flux
        out[1:] += self.dt * flux
        return out

    def propagator(self) -> np.ndarray:
        """Dense one-step transition matrix acting on mass vectors."""
        a = np.eye(self.n)
        scale = self.dt / self.h
        lo = scale * self.c_lo
        hi = scale * self.c_hi
        idx = np.arange(self.n - 1)
        a[idx, idx] -= lo
        a[idx + 1, idx] += lo
        a[idx, idx + 1] += hi
        a[idx + 1, idx + 1] -= hi
        return a


def _check_state(mass: np.ndarray, t: float):
    if mass.min() < -1e-8:
        raise SolverError(f"negative density {mass.min():.3e} at t={t:.4g}")
    if abs(mass.sum() - 1.0) > 1e-4:
        raise SolverError(f"mass drift {mass.sum() - 1.0:.3e} at t={t:.4g}")


def evolve_fp(p: Potential, d_coeff: float, g: Grid1D, rho0: DensityEstimate,
              t_end: float, n_snapshots: int = 50) -> EvolutionTrace:
    """Integrate the FP equation to t_end, storing n_snapshots+1 states
    (including t=0).

    Stops early once the L1 change per step falls below 1e-10 (stationary
    reached).  For long horizons on small grids the per-interval update is
    applied as a precomputed dense propagator power, which is numerically
    identical in exact arithmetic and orders of magnitude faster.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    if rho0.grid is not g and rho0.grid != g:
        raise ValueError("rho0 must live on the target grid")
    stepper = _FluxStepper(p, d_coeff, g)
    dt = stepper.dt
    total_steps = max(1, int(np.ceil(t_end / dt)))
    per_snap = max(1, total_steps // n_snapshots)

    mass = rho0.mass.astype(float).copy()
    snapshots = [DensityEstimate(grid=g, mass=mass.copy())]
    times = [0.0]

    use_power = per_snap > _POWERING_THRESHOLD and g.size <= _POWERING_MAX_N
    if use_power:
        prop = np.linalg.matrix_power(stepper.propagator(), per_snap)

    steps_done = 0
    while steps_done < total_steps:
        chunk = min(per_snap, total_steps - steps_done)
        prev = mass
        if use_power and chunk == per_snap:
            mass = prop @ mass
        else:
            for _ in range(chunk):
                mass = stepper.step(mass)
        steps_done += chunk
        t = steps_done * dt
        _check_state(mass, t)
        mass = np.maximum(mass, 0.0)
        snapshots.append(DensityEstimate(grid=g, mass=mass / mass.sum()))
        times.append(t)
        if np.abs(mass - prev).sum() / chunk < 1e-10:
            break
    return EvolutionTrace(grid=g, snapshots=snapshots, dt=dt,
                          times=np.asarray(times))


def stationary_2d(p1: Potential, p2: Potential, d_coeff: float,
                  g: Grid2D) -> Field2D:
    """Stationary density of the separable potential V(x1,x2)=p1(x1)+p2(x2):
    the product of the axis marginals."""
    mx = stationary_analytic(p1, d_coeff, g.gx).mass
    my = stationary_analytic(p2, d_coeff, g.gy).mass
    return Field2D(grid=g, values=np.outer(mx, my).ravel())


def drift_field_2d(p1: Potential, p2: Potential, g: Grid2D) -> VectorField2D:
    """Gradient drift (-p1'(x1), -p2'(x2)) at every grid point, row-major."""
    ux = -np.array([gradient_fd(p1, x) for x in g.gx.points])
    vy = -np.array([gradient_fd(p2, y) for y in g.gy.points])
    u = np.repeat(ux, g.gy.size)
    v = np.tile(vy, g.gx.size)
    return VectorField2D(grid=g, u=u, v=v)
