"""Linear-policy agents: the FP-flow actor-critic with its stationary-density
exploration bonus, plus SAC-lite, DDPG-lite and random baselines.

All agents share the same function class so behavioural differences come from
the exploration mechanism alone: policy mean s^T mu / ||s|| (a d x m weight
matrix applied to the normalised state), a single shared log-std, and a
linear critic phi^T s trained by temporal differences.

The FP-flow agent augments the reward with alpha * log(1 / rho_hat(s)),
where rho_hat is the annealed amplitude estimate of the stationary density
looked up at the state's first coordinate, weights its score-function actor
gradient by the drift -V'(x1), and pins the policy variance to the diffusion
coefficient through the diffusion-matching update on log sigma.

Note on the variance update: the raw increment +eta*(sigma^2 - D)/sigma is
repulsive at sigma^2 = D (a step along it moves sigma away from the target);
the stabilised (negated) form is the default and the raw form remains
available behind ``stable_sigma_update=False`` for comparison runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .grids import Grid1D, make_grid
from .potentials import Potential, gradient_fd
from .qae import QaeConfig, annealed_qae

LOG_SIGMA_MIN = math.log(1e-3)
LOG_SIGMA_MAX = math.log(1e2)
STATE_NORM_FLOOR = 1e-8
RHO_FLOOR = 1e-8

GAUSSIAN_ENTROPY_CONST = 0.5 * math.log(2.0 * math.pi * math.e)


# ---------------------------------------------------------------------------
# parameter containers and configs

@dataclass
class AgentParams:
    """Policy mean weights, shared log-std, critic weights, momentum buffer."""

    mu: np.ndarray            # (d, m)
    log_sigma: float
    phi: np.ndarray           # (d,)
    momentum: np.ndarray      # (d, m)

    @classmethod
    def zeros(cls, state_dim: int, action_dim: int, log_sigma: float = 0.0):
        return cls(mu=np.zeros((state_dim, action_dim)),
                   log_sigma=float(log_sigma),
                   phi=np.zeros(state_dim),
                   momentum=np.zeros((state_dim, action_dim)))

    @property
    def sigma(self) -> float:
        return math.exp(self.log_sigma)


@dataclass(frozen=True)
class FPFlowConfig:
    alpha: float = 0.5            # exploration bonus coefficient
    beta: float = 1.5             # estimator inverse temperature
    d_coeff: float = 0.3          # diffusion coefficient (variance target)
    eta_actor: float = 5e-3
    eta_critic: float = 1e-2
    gamma: float = 0.99
    momentum: float = 0.9
    qae_refresh: int = 10         # density cache refresh period, in lookups
    potential_source: str = "reward_slice"   # or "critic_slice"
    stable_sigma_update: bool = True
    drift_weight: str = "magnitude"   # "magnitude" | "signed" | "signed_negated"
    fd_step: float = 1e-3
    grad_clip: float = 1.0        # max Frobenius norm of the actor gradient; 0 disables

    def __post_init__(self):
        for name in ("alpha", "beta", "d_coeff", "eta_actor", "eta_critic",
                     "momentum", "fd_step"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.qae_refresh < 1:
            raise ValueError("qae_refresh must be >= 1")
        if self.potential_source not in ("reward_slice", "critic_slice"):
            raise ValueError(f"unknown potential_source {self.potential_source!r}")
        if self.drift_weight not in ("magnitude", "signed", "signed_negated"):
            raise ValueError(f"unknown drift_weight {self.drift_weight!r}")


@dataclass(frozen=True)
class SacConfig:
    alpha_sac: float = 0.2
    eta: float = 5e-3
    gamma: float = 0.99
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8


@dataclass(frozen=True)
class DdpgConfig:
    sigma_ou: float = 0.2
    theta_ou: float = 0.15
    eta_actor: float = 5e-3
    eta_critic: float = 1e-2
    gamma: float = 0.99
    momentum: float = 0.9


@dataclass
class Transition:
    s: np.ndarray
    a: np.ndarray
    r_env: float
    s_next: np.ndarray
    done: bool
    rho_hat: float = 1.0     # stationary-density estimate at s, in (0, 1]
    a_raw: np.ndarray | None = None   # pre-clip policy sample, see score_action

    @property
    def score_action(self) -> np.ndarray:
        """Action entering the score function.

        Score-based updates use the raw Gaussian sample when available: the
        environment clips the realized action anyway, and scoring the clipped
        value biases the estimator (E[a - mean] != 0 under truncation, and
        once |mean| leaves the box the bias stops shrinking, which turns the
        actor update into a runaway).  Falls back to the realized action.
        """
        return self.a if self.a_raw is None else self.a_raw


# ---------------------------------------------------------------------------
# shared pieces

def policy_mean(mu: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Mean action mu^T s / max(||s||, floor)."""
    return s @ mu / max(float(np.linalg.norm(s)), STATE_NORM_FLOOR)


def sample_action(params: AgentParams, s: np.ndarray, rng,
                  action_clip: float = 1.0) -> np.ndarray:
    """Gaussian action around the policy mean with the shared std, clipped."""
    return sample_action_pair(params, s, rng, action_clip)[0]


def sample_action_pair(params: AgentParams, s: np.ndarray, rng,
                       action_clip: float = 1.0):
    """(clipped action, raw Gaussian sample) for score-based updates."""
    mean = policy_mean(params.mu, s)
    raw = mean + params.sigma * rng.standard_normal(mean.shape)
    return np.clip(raw, -action_clip, action_clip), raw


def exploration_bonus(rho_hat: float, alpha: float) -> float:
    """alpha * ln(1 / rho_hat); nonpositive rho_hat is floored (and counted)."""
    if rho_hat <= 0.0:
        exploration_bonus.floor_count += 1
        rho_hat = RHO_FLOOR
    return alpha * math.log(1.0 / rho_hat)


exploration_bonus.floor_count = 0


def random_action(action_dim: int, rng) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=action_dim)


def _check_finite(params: AgentParams, context: str):
    if not (np.all(np.isfinite(params.mu)) and np.all(np.isfinite(params.phi))
            and math.isfinite(params.log_sigma)):
        raise NumericError(f"non-finite parameters after {context} update")


def _td_error(params: AgentParams, tr: Transition, gamma: float,
              reward: float) -> float:
    cont = 0.0 if tr.done else gamma * float(params.phi @ tr.s_next)
    return reward + cont - float(params.phi @ tr.s)


# ---------------------------------------------------------------------------
# update rules

def fpflow_update(params: AgentParams, tr: Transition, potential: Potential,
                  cfg: FPFlowConfig) -> dict:
    """One FP-flow step: bonus-augmented TD, drift-weighted score gradient
    with momentum on mu, diffusion matching on log sigma."""
    bonus = exploration_bonus(tr.rho_hat, cfg.alpha)
    delta = _td_error(params, tr, cfg.gamma, tr.r_env + bonus)
    params.phi += cfg.eta_critic * delta * tr.s

    s_norm = max(float(np.linalg.norm(tr.s)), STATE_NORM_FLOOR)
    s_hat = tr.s / s_norm
    mean = s_hat @ params.mu
    sigma = params.sigma
    f_fp = -gradient_fd(potential, float(tr.s[0]), cfg.fd_step)
    # The drift factor enters as a magnitude by default: a signed factor
    # inverts the score credit wherever the drift points against x1, which
    # empirically pins the policy at the potential barrier (and the opposite
    # overall sign stops learning on the benchmark task altogether).  The
    # signed variants stay available for comparison runs.
    if cfg.drift_weight == "magnitude":
        weight = abs(f_fp)
    elif cfg.drift_weight == "signed":
        weight = f_fp
    else:
        weight = -f_fp
    grad = delta * weight * np.outer(s_hat, (tr.score_action - mean) / sigma ** 2)
    # bounded step: raw momentum SGD on the score gradient is otherwise
    # unstable once the mean action leaves the clip box (|a - mean| grows
    # with |mean| and the walk becomes multiplicative)
    if cfg.grad_clip > 0:
        norm = float(np.linalg.norm(grad))
        if norm > cfg.grad_clip:
            grad *= cfg.grad_clip / norm
    params.momentum *= cfg.momentum
    params.momentum += (1.0 - cfg.momentum) * grad
    params.mu += cfg.eta_actor * params.momentum

    drift = cfg.eta_actor * (sigma ** 2 - cfg.d_coeff) / sigma
    params.log_sigma += -drift if cfg.stable_sigma_update else drift
    params.log_sigma = min(max(params.log_sigma, LOG_SIGMA_MIN), LOG_SIGMA_MAX)
    _check_finite(params, "fpflow")
    return {"bonus": bonus, "delta": delta}


@dataclass
class AdamState:
    """First/second-moment accumulators per parameter group."""

    m_mu: np.ndarray
    v_mu: np.ndarray
    m_ls: float
    v_ls: float
    m_phi: np.ndarray
    v_phi: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, state_dim: int, action_dim: int):
        return cls(m_mu=np.zeros((state_dim, action_dim)),
                   v_mu=np.zeros((state_dim, action_dim)),
                   m_ls=0.0, v_ls=0.0,
                   m_phi=np.zeros(state_dim), v_phi=np.zeros(state_dim))


def _adam_step(m, v, grad, t, cfg: SacConfig):
    """Bias-corrected adaptive step; returns (step, m, v)."""
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad ** 2
    m_hat = m / (1.0 - cfg.adam_beta1 ** t)
    v_hat = v / (1.0 - cfg.adam_beta2 ** t)
    return cfg.eta * m_hat / (np.sqrt(v_hat) + cfg.adam_eps), m, v


def sac_update(params: AgentParams, adam: AdamState, tr: Transition,
               cfg: SacConfig) -> dict:
    """Entropy-regularised score-function step with adaptive moments on all
    parameter groups (critic included)."""
    delta = _td_error(params, tr, cfg.gamma, tr.r_env)
    s_norm = max(float(np.linalg.norm(tr.s)), STATE_NORM_FLOOR)
    s_hat = tr.s / s_norm
    mean = s_hat @ params.mu
    sigma = params.sigma
    action_dim = params.mu.shape[1]

    grad_mu = delta * np.outer(s_hat, (tr.a - mean) / sigma ** 2)
    score_ls = float(np.sum((tr.a - mean) ** 2 / sigma ** 2) - action_dim)
    grad_phi = delta * tr.s

    grad_ls = delta * score_ls + cfg.alpha_sac * action_dim

    adam.t += 1
    step_mu, adam.m_mu, adam.v_mu = _adam_step(adam.m_mu, adam.v_mu, grad_mu,
                                               adam.t, cfg)
    step_ls, adam.m_ls, adam.v_ls = _adam_step(adam.m_ls, adam.v_ls, grad_ls,
                                               adam.t, cfg)
    step_phi, adam.m_phi, adam.v_phi = _adam_step(adam.m_phi, adam.v_phi,
                                                  grad_phi, adam.t, cfg)
    params.mu += step_mu
    params.log_sigma = min(max(params.log_sigma + float(step_ls),
                               LOG_SIGMA_MIN), LOG_SIGMA_MAX)
    params.phi += step_phi
    _check_finite(params, "sac")
    return {"bonus": 0.0, "delta": delta}


class OUNoise:
    """Mean-reverting exploration noise n' = n - theta*n + sigma*N(0, I)."""

    def __init__(self, size: int, theta: float, sigma: float):
        self.theta = theta
        self.sigma = sigma
        self.state = np.zeros(size)

    def reset(self):
        self.state = np.zeros_like(self.state)

    def sample(self, rng) -> np.ndarray:
        self.state = (self.state - self.theta * self.state
                      + self.sigma * rng.standard_normal(self.state.shape))
        return self.state


def ddpg_update(params: AgentParams, tr: Transition, cfg: DdpgConfig) -> dict:
    """TD critic plus a deterministic-policy-style actor step: the TD error
    pushed along d(action)/d(mu) = s_hat for every action column."""
    delta = _td_error(params, tr, cfg.gamma, tr.r_env)
    params.phi += cfg.eta_critic * delta * tr.s
    s_norm = max(float(np.linalg.norm(tr.s)), STATE_NORM_FLOOR)
    s_hat = tr.s / s_norm
    grad = delta * np.outer(s_hat, np.ones(params.mu.shape[1]))
    params.momentum *= cfg.momentum
    params.momentum += (1.0 - cfg.momentum) * grad
    params.mu += cfg.eta_actor * params.momentum
    _check_finite(params, "ddpg")
    return {"bonus": 0.0, "delta": delta}


# ---------------------------------------------------------------------------
# training-loop wrappers

class FPFlowAgent:
    """Actor-critic with the stationary-density exploration bonus.

    The density estimate is cached and recomputed every ``qae_refresh``
    lookups.  With the default reward-slice source the underlying potential
    is static; with the critic-slice source it is rebuilt from the current
    critic weights at every refresh.
    """

    name = "fpflow"

    def __init__(self, state_dim: int, action_dim: int,
                 cfg: FPFlowConfig = FPFlowConfig(),
                 qae_cfg: QaeConfig = QaeConfig(),
                 grid: Grid1D | None = None,
                 potential: Potential | None = None,
                 action_clip: float = 1.0):
        self.cfg = cfg
        self.qae_cfg = qae_cfg
        self.grid = grid or make_grid(-3.0, 3.0, qae_cfg.n_qubits)
        self._explicit_potential = potential
        self.action_clip = action_clip
        self.params = AgentParams.zeros(state_dim, action_dim)
        self.action_dim = action_dim
        self._cache = None
        self._lookups = 0

    def _potential(self) -> Potential:
        if self._explicit_potential is not None:
            return self._explicit_potential
        if self.cfg.potential_source == "reward_slice":
            if not hasattr(self, "_reward_slice"):
                self._reward_slice = Potential.reward_slice()
            return self._reward_slice
        # critic slice: V(x) = -phi_1 * x along the first coordinate, shifted
        # to min 0 on the grid
        vs = -self.params.phi[0] * self.grid.points
        self._critic_slice = Potential.tabulated(self.grid.points, vs - vs.min())
        return self._critic_slice

    def _refresh(self):
        self._current_potential = self._potential()
        self._cache = annealed_qae(self._current_potential, self.grid, self.qae_cfg)

    def rho_hat(self, s: np.ndarray) -> float:
        if self._cache is None or self._lookups % self.cfg.qae_refresh == 0:
            self._refresh()
        self._lookups += 1
        return max(float(self._cache.mass_at(float(s[0]))), RHO_FLOOR)

    def act(self, s, rng):
        return sample_action(self.params, s, rng, self.action_clip)

    def act_sample(self, s, rng):
        return sample_action_pair(self.params, s, rng, self.action_clip)

    def update(self, tr: Transition) -> dict:
        if self._cache is None:
            self._refresh()
        return fpflow_update(self.params, tr, self._current_potential, self.cfg)

    def entropy(self) -> float:
        return self.action_dim * (GAUSSIAN_ENTROPY_CONST + self.params.log_sigma)


class SacLiteAgent:
    name = "sac"

    def __init__(self, state_dim: int, action_dim: int,
                 cfg: SacConfig = SacConfig(), action_clip: float = 1.0):
        self.cfg = cfg
        self.params = AgentParams.zeros(state_dim, action_dim)
        self.adam = AdamState.zeros(state_dim, action_dim)
        self.action_dim = action_dim
        self.action_clip = action_clip

    def rho_hat(self, s) -> float:
        return 1.0

    def act(self, s, rng):
        return sample_action(self.params, s, rng, self.action_clip)

    def act_sample(self, s, rng):
        return sample_action_pair(self.params, s, rng, self.action_clip)

    def update(self, tr: Transition) -> dict:
        return sac_update(self.params, self.adam, tr, self.cfg)

    def entropy(self) -> float:
        return self.action_dim * (GAUSSIAN_ENTROPY_CONST + self.params.log_sigma)


class DdpgLiteAgent:
    name = "ddpg"

    def __init__(self, state_dim: int, action_dim: int,
                 cfg: DdpgConfig = DdpgConfig(), action_clip: float = 1.0):
        self.cfg = cfg
        self.params = AgentParams.zeros(state_dim, action_dim)
        self.noise = OUNoise(action_dim, cfg.theta_ou, cfg.sigma_ou)
        self.action_dim = action_dim
        self.action_clip = action_clip

    def rho_hat(self, s) -> float:
        return 1.0

    def act(self, s, rng):
        a = policy_mean(self.params.mu, s) + self.noise.sample(rng)
        return np.clip(a, -self.action_clip, self.action_clip)

    def act_sample(self, s, rng):
        return self.act(s, rng), None

    def update(self, tr: Transition) -> dict:
        return ddpg_update(self.params, tr, self.cfg)

    def entropy(self) -> float:
        # differential entropy of the stationary exploration noise
        std = self.cfg.sigma_ou / math.sqrt(2 * self.cfg.theta_ou - self.cfg.theta_ou ** 2)
        return self.action_dim * (GAUSSIAN_ENTROPY_CONST + math.log(std))


class RandomAgent:
    name = "random"

    def __init__(self, state_dim: int, action_dim: int, action_clip: float = 1.0):
        self.params = AgentParams.zeros(state_dim, action_dim)
        self.action_dim = action_dim

    def rho_hat(self, s) -> float:
        return 1.0

    def act(self, s, rng):
        return random_action(self.action_dim, rng)

    def act_sample(self, s, rng):
        return self.act(s, rng), None

    def update(self, tr: Transition) -> dict:
        return {"bonus": 0.0, "delta": 0.0}

    def entropy(self) -> float:
        return self.action_dim * math.log(2.0)
