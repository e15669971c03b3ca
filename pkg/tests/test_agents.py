import math

import numpy as np
import pytest

import fpflow.agents as agents_mod
from fpflow.agents import (AdamState, AgentParams, DdpgConfig, DdpgLiteAgent,
                           FPFlowAgent, FPFlowConfig, OUNoise, SacConfig,
                           SacLiteAgent, Transition, ddpg_update,
                           exploration_bonus, fpflow_update, policy_mean,
                           random_action, sac_update, sample_action,
                           sample_action_pair)
from fpflow.errors import NumericError
from fpflow.grids import make_grid
from fpflow.potentials import Potential
from fpflow.qae import QaeConfig

D4, M2 = 4, 2
HARMONIC = Potential.harmonic()
LINEAR_DRIFT_ONE = Potential.tabulated([-100.0, 100.0], [100.0, -100.0])  # V=-x


def make_transition(s=None, a=None, r=1.0, s_next=None, done=False, rho=1.0):
    s = np.asarray(s if s is not None else [1.0, 0.5, -0.3, 0.2], dtype=float)
    a = np.asarray(a if a is not None else [0.4, -0.2], dtype=float)
    s_next = np.asarray(s_next if s_next is not None else 0.92 * s, dtype=float)
    return Transition(s=s, a=a, r_env=r, s_next=s_next, done=done, rho_hat=rho)


class TestPolicyBasics:
    def test_zero_state_zero_mean(self):
        p = AgentParams.zeros(D4, M2)
        p.mu += 1.0
        assert np.allclose(policy_mean(p.mu, np.zeros(D4)), 0.0)

    def test_sample_reproducible(self):
        p = AgentParams.zeros(D4, M2)
        a = sample_action(p, np.ones(D4), np.random.default_rng(7))
        b = sample_action(p, np.ones(D4), np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_sample_clipped(self):
        p = AgentParams.zeros(D4, M2, log_sigma=math.log(50.0))
        rng = np.random.default_rng(0)
        for _ in range(50):
            assert np.all(np.abs(sample_action(p, np.ones(D4), rng)) <= 1.0)

    def test_tiny_sigma_concentrates_at_mean(self):
        p = AgentParams.zeros(D4, M2, log_sigma=math.log(1e-3))
        p.mu[0, :] = 0.25
        s = np.array([1.0, 0.0, 0.0, 0.0])
        rng = np.random.default_rng(3)
        mean = policy_mean(p.mu, s)
        for _ in range(100):
            assert np.all(np.abs(sample_action(p, s, rng) - mean) <= 4e-3)

    def test_pair_returns_raw_sample(self):
        p = AgentParams.zeros(D4, M2)
        p.mu[0, :] = 5.0  # mean far outside the clip box
        a, raw = sample_action_pair(p, np.array([1.0, 0, 0, 0]),
                                    np.random.default_rng(0))
        assert np.all(np.abs(a) <= 1.0)
        assert np.any(np.abs(raw) > 1.0)


class TestExplorationBonus:
    def test_full_mass_no_bonus(self):
        assert exploration_bonus(1.0, 0.5) == 0.0

    def test_inverse_e(self):
        assert exploration_bonus(math.exp(-1.0), 0.5) == pytest.approx(0.5, rel=1e-12)

    def test_uniform_128_cells(self):
        assert exploration_bonus(1.0 / 128, 0.5) == pytest.approx(0.5 * math.log(128), rel=1e-12)
        assert exploration_bonus(1.0 / 128, 0.5) == pytest.approx(2.4260, abs=1e-4)

    def test_nonnegative_and_zero_only_at_one(self):
        for rho in (1e-8, 1e-4, 0.3, 0.999, 1.0):
            b = exploration_bonus(rho, 0.5)
            assert b >= 0.0
            assert (b == 0.0) == (rho == 1.0)

    def test_floor_counts_warnings(self):
        before = exploration_bonus.floor_count
        b = exploration_bonus(0.0, 0.5)
        assert exploration_bonus.floor_count == before + 1
        assert b == pytest.approx(0.5 * math.log(1e8))
        exploration_bonus(-1.0, 0.5)
        assert exploration_bonus.floor_count == before + 2


class TestFpflowUpdate:
    def test_zero_delta_leaves_mu_phi(self):
        cfg = FPFlowConfig()
        p = AgentParams.zeros(D4, M2)
        tr = make_transition(r=0.0, rho=1.0)
        fpflow_update(p, tr, HARMONIC, cfg)
        assert np.allclose(p.mu, 0.0)
        assert np.allclose(p.phi, 0.0)

    def test_zero_delta_momentum_decays(self):
        cfg = FPFlowConfig()
        p = AgentParams.zeros(D4, M2)
        p.momentum += 1.0
        fpflow_update(p, make_transition(r=0.0, rho=1.0), HARMONIC, cfg)
        assert np.allclose(p.momentum, cfg.momentum * 1.0)

    def test_sigma_fixed_point(self):
        cfg = FPFlowConfig()
        p = AgentParams.zeros(D4, M2, log_sigma=0.5 * math.log(cfg.d_coeff))
        before = p.log_sigma
        fpflow_update(p, make_transition(r=0.0, rho=1.0), HARMONIC, cfg)
        assert p.log_sigma == pytest.approx(before, abs=1e-15)

    def test_sigma_decrement_hand_value(self):
        cfg = FPFlowConfig()
        p = AgentParams.zeros(D4, M2, log_sigma=0.0)  # sigma = 1
        fpflow_update(p, make_transition(r=0.0, rho=1.0), HARMONIC, cfg)
        assert p.log_sigma == pytest.approx(-5e-3 * (1.0 - 0.3) / 1.0, rel=1e-12)

    def test_unstable_variant_reverses_sign(self):
        cfg = FPFlowConfig(stable_sigma_update=False)
        p = AgentParams.zeros(D4, M2, log_sigma=0.0)
        fpflow_update(p, make_transition(r=0.0, rho=1.0), HARMONIC, cfg)
        assert p.log_sigma == pytest.approx(+3.5e-3, rel=1e-12)

    @pytest.mark.parametrize("sigma0", [0.1, 2.0])
    def test_sigma_converges_to_diffusion(self, sigma0):
        cfg = FPFlowConfig()
        p = AgentParams.zeros(D4, M2, log_sigma=math.log(sigma0))
        tr = make_transition(r=0.0, rho=1.0)
        for _ in range(10 ** 4):
            fpflow_update(p, tr, HARMONIC, cfg)
        assert abs(p.sigma ** 2 - cfg.d_coeff) < 1e-3

    def test_sigma_clamped(self):
        cfg = FPFlowConfig()
        p = AgentParams.zeros(D4, M2, log_sigma=math.log(1e-3))
        tr = make_transition(r=0.0, rho=1.0)
        fpflow_update(p, tr, HARMONIC, cfg)
        assert p.log_sigma >= math.log(1e-3)

    def test_vanilla_equivalence_with_unit_drift(self):
        # alpha = 0 and f_FP = 1 reduce the update to a plain score-function
        # actor-critic step, computed here independently
        cfg = FPFlowConfig(alpha=0.0, grad_clip=0.0)
        p = AgentParams.zeros(D4, M2, log_sigma=0.1)
        p.phi[:] = [0.3, -0.1, 0.2, 0.05]
        p.mu[:] = 0.05
        p.momentum[:] = 0.01
        tr = make_transition(r=2.0, rho=0.5)

        phi0, mu0, m0 = p.phi.copy(), p.mu.copy(), p.momentum.copy()
        sigma = math.exp(0.1)
        delta = 2.0 + cfg.gamma * float(phi0 @ tr.s_next) - float(phi0 @ tr.s)
        phi_exp = phi0 + cfg.eta_critic * delta * tr.s
        s_hat = tr.s / np.linalg.norm(tr.s)
        g = delta * np.outer(s_hat, (tr.a - s_hat @ mu0) / sigma ** 2)
        m_exp = cfg.momentum * m0 + (1 - cfg.momentum) * g
        mu_exp = mu0 + cfg.eta_actor * m_exp

        fpflow_update(p, tr, LINEAR_DRIFT_ONE, cfg)
        assert np.allclose(p.phi, phi_exp, atol=1e-14)
        assert np.allclose(p.mu, mu_exp, atol=1e-14)
        assert np.allclose(p.momentum, m_exp, atol=1e-14)

    def test_gradient_clip_bounds_step(self):
        cfg = FPFlowConfig(grad_clip=1.0)
        p = AgentParams.zeros(D4, M2)
        tr = make_transition(r=1e6, rho=1e-8)
        fpflow_update(p, tr, Potential.reward_slice(), cfg)
        assert np.linalg.norm(p.mu) <= cfg.eta_actor * (1 - cfg.momentum) * 1.0 + 1e-12

    def test_nonfinite_raises(self):
        cfg = FPFlowConfig(grad_clip=0.0)
        p = AgentParams.zeros(D4, M2)
        p.phi[0] = np.inf
        with pytest.raises(NumericError):
            fpflow_update(p, make_transition(), HARMONIC, cfg)

    def test_drift_weight_validation(self):
        with pytest.raises(ValueError):
            FPFlowConfig(drift_weight="upside_down")

    def test_critic_td_matches_least_squares_on_chain(self):
        # terminal transitions drop the continuation term, so the critic sees
        # immediate rewards only; its fixed point solves the normal equations
        cfg = FPFlowConfig(alpha=0.0)
        p = AgentParams.zeros(2, 1)
        states = np.array([[1.0, 0.0], [0.7, 0.7], [0.2, -1.0]])
        rewards = np.array([1.0, -0.5, 2.0])
        for _ in range(3000):
            for s, r in zip(states, rewards):
                tr = Transition(s=s, a=np.zeros(1), r_env=float(r),
                                s_next=np.zeros(2), done=True, rho_hat=1.0)
                fpflow_update(p, tr, HARMONIC, cfg)
        expected, *_ = np.linalg.lstsq(states, rewards, rcond=None)
        assert np.allclose(p.phi, expected, atol=1e-3)


class TestSacUpdate:
    def test_no_entropy_no_delta_is_noop(self):
        cfg = SacConfig(alpha_sac=0.0)
        p = AgentParams.zeros(D4, M2)
        adam = AdamState.zeros(D4, M2)
        sac_update(p, adam, make_transition(r=0.0), cfg)
        assert np.allclose(p.mu, 0.0)
        assert p.log_sigma == 0.0
        assert np.allclose(p.phi, 0.0)

    def test_entropy_alone_raises_log_sigma(self):
        cfg = SacConfig()
        p = AgentParams.zeros(D4, M2)
        adam = AdamState.zeros(D4, M2)
        tr = make_transition(r=0.0)  # delta stays 0 with zero critic
        history = [p.log_sigma]
        for _ in range(20):
            sac_update(p, adam, tr, cfg)
            history.append(p.log_sigma)
        assert all(b > a for a, b in zip(history, history[1:]))

    def test_positive_delta_moves_mean_toward_action(self):
        cfg = SacConfig(alpha_sac=0.0)
        p = AgentParams.zeros(D4, M2)
        adam = AdamState.zeros(D4, M2)
        s = np.array([1.0, 0.0, 0.0, 0.0])
        a = np.array([0.8, -0.6])
        tr = Transition(s=s, a=a, r_env=5.0, s_next=np.zeros(D4), done=True)
        for _ in range(200):
            sac_update(p, adam, tr, cfg)
        mean = policy_mean(p.mu, s)
        assert mean[0] > 0.2
        assert mean[1] < -0.2


class TestDdpg:
    def test_zero_noise_deterministic(self):
        agent = DdpgLiteAgent(D4, M2, DdpgConfig(sigma_ou=0.0))
        s = np.ones(D4)
        rng = np.random.default_rng(0)
        assert np.array_equal(agent.act(s, rng), agent.act(s, rng))

    def test_ou_mean_reversion(self):
        noise = OUNoise(M2, theta=0.15, sigma=0.2)
        noise.state = np.array([1.0, -2.0])

        class Zero:
            def standard_normal(self, shape):
                return np.zeros(shape)

        out = noise.sample(Zero())
        assert np.allclose(out, [0.85, -1.7])

    def test_ou_stationary_std(self):
        noise = OUNoise(1, theta=0.15, sigma=0.2)
        rng = np.random.default_rng(123)
        samples = np.array([noise.sample(rng)[0] for _ in range(10 ** 5)])
        expected = 0.2 / math.sqrt(2 * 0.15 - 0.15 ** 2)
        assert samples[1000:].std() == pytest.approx(expected, rel=0.05)

    def test_update_changes_actor_along_state(self):
        cfg = DdpgConfig()
        p = AgentParams.zeros(D4, M2)
        ddpg_update(p, make_transition(r=3.0), cfg)
        assert np.linalg.norm(p.mu) > 0
        assert np.linalg.norm(p.phi) > 0


class TestRandomAgent:
    def test_bounds_and_repro(self):
        rng = np.random.default_rng(5)
        draws = np.array([random_action(M2, rng) for _ in range(10 ** 5)])
        assert np.all(np.abs(draws) <= 1.0)
        se = (2.0 / math.sqrt(12.0)) / math.sqrt(draws.size)
        assert abs(draws.mean()) <= 3 * se
        a = random_action(M2, np.random.default_rng(9))
        b = random_action(M2, np.random.default_rng(9))
        assert np.array_equal(a, b)


class TestFuzzFiniteness:
    def test_all_agents_stay_finite(self):
        rng = np.random.default_rng(2024)
        fp = FPFlowAgent(D4, M2)
        sac = SacLiteAgent(D4, M2)
        ddpg = DdpgLiteAgent(D4, M2)
        agents = [fp, sac, ddpg]
        n = 100_000
        for i in range(n):
            agent = agents[i % 3]
            s = 3.0 * rng.standard_normal(D4)
            tr = Transition(s=s, a=rng.uniform(-1, 1, M2),
                            r_env=float(30.0 * rng.standard_normal()),
                            s_next=3.0 * rng.standard_normal(D4),
                            done=bool(rng.random() < 0.01),
                            rho_hat=float(rng.uniform(1e-8, 1.0)))
            agent.update(tr)
        for agent in agents:
            assert np.all(np.isfinite(agent.params.mu))
            assert np.all(np.isfinite(agent.params.phi))
            assert math.isfinite(agent.params.log_sigma)


class TestFPFlowAgent:
    def test_rho_hat_refresh_cadence(self, monkeypatch):
        calls = {"n": 0}
        real = agents_mod.annealed_qae

        def counting(*args, **kwargs):
            calls["n"] += 1
            return real(*args, **kwargs)

        monkeypatch.setattr(agents_mod, "annealed_qae", counting)
        agent = FPFlowAgent(D4, M2, FPFlowConfig(qae_refresh=10),
                            QaeConfig(n_qubits=4), make_grid(-3, 3, 4))
        s = np.array([0.5, 0, 0, 0])
        for _ in range(25):
            agent.rho_hat(s)
        assert calls["n"] == 3  # lookups 0, 10, 20

    def test_rho_hat_floored_positive(self):
        agent = FPFlowAgent(D4, M2)
        assert agent.rho_hat(np.array([99.0, 0, 0, 0])) >= 1e-8

    def test_critic_slice_source(self):
        agent = FPFlowAgent(D4, M2, FPFlowConfig(potential_source="critic_slice"),
                            QaeConfig(n_qubits=4), make_grid(-3, 3, 4))
        agent.params.phi[0] = 2.0
        rho = agent.rho_hat(np.array([1.0, 0, 0, 0]))
        assert 0 < rho <= 1
        # critic slice potential is -phi_1 * x shifted to min 0 on the grid
        pot = agent._current_potential
        vs = pot(agent.grid.points)
        assert vs.min() == pytest.approx(0.0, abs=1e-12)
        assert vs[0] > vs[-1]  # decreasing for positive phi_1

    def test_entropy_matches_formula(self):
        agent = FPFlowAgent(D4, M2)
        agent.params.log_sigma = 0.3
        expected = 2 * (0.5 * math.log(2 * math.pi * math.e) + 0.3)
        assert agent.entropy() == pytest.approx(expected)

    def test_update_returns_bonus_info(self):
        agent = FPFlowAgent(D4, M2)
        tr = make_transition(rho=math.exp(-2.0))
        info = agent.update(tr)
        assert info["bonus"] == pytest.approx(0.5 * 2.0)
