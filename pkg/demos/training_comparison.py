"""Train all four agents on the two-mode benchmark and compare.

A shortened run (150 episodes per agent, one seed) that shows the
characteristic behaviours: the density-bonus agent keeps a wide policy
(variance pinned to the diffusion coefficient) and finds the higher mode,
SAC-lite's variance collapses, DDPG-lite is noisy, and random actions earn
steadily negative reward. The full 400-episode multi-seed protocol runs via
the command line interface (see README).
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from fpflow import smooth
from fpflow.experiments import ExperimentConfig, run_single_training

EPISODES = 150
cfg = ExperimentConfig(episodes=EPISODES)

runs = {}
for agent in ("fpflow", "sac", "ddpg", "random"):
    runs[agent] = run_single_training(agent, seed=0, cfg=cfg)
    tail = runs[agent].env_reward[-30:]
    print(f"{agent:7s} final-30 reward {tail.mean():8.1f} +- {tail.std():6.1f}  "
          f"discovery rate {runs[agent].discovery_fraction[-30:].mean():.3f}  "
          f"entropy {runs[agent].mean_entropy[-1]:6.2f} nats")

fig, (ax1, ax2, ax3) = plt.subplots(1, 3, figsize=(13, 3.8))
for agent, run in runs.items():
    ax1.plot(smooth(run.env_reward, 25), label=agent)
    ax2.plot(smooth(run.discovery_fraction, 25), label=agent)
    ax3.plot(run.mean_entropy, label=agent)
ax1.set_title("reward (window 25)")
ax1.set_xlabel("episode")
ax2.set_title("global-optimum rate")
ax2.set_xlabel("episode")
ax3.set_title("policy entropy (nats)")
ax3.set_xlabel("episode")
ax1.legend(fontsize=8)
fig.tight_layout()
fig.savefig("training_comparison.png", dpi=120)
print("wrote training_comparison.png")
