"""fpflow: quantum-inspired amplitude estimation of Fokker-Planck stationary
densities, an exploration-bonus actor-critic built on it, and a benchmark
harness for query-complexity, scaling, ablation and exploration experiments.
"""

from .agents import (AgentParams, DdpgConfig, DdpgLiteAgent, FPFlowAgent,
                     FPFlowConfig, OUNoise, RandomAgent, SacConfig,
                     SacLiteAgent, Transition, exploration_bonus,
                     policy_mean, random_action, sample_action,
                     sample_action_pair)
from .envs import (EnvConfig, EnvState, MultimodalRewardEnv, is_global_optimum,
                   reward_landscape)
from .errors import (ConfigError, FpflowError, NumericError, ResourceError,
                     SolverError)
from .fokker_planck import (EvolutionTrace, Field2D, VectorField2D,
                            drift_field_2d, evolve_fp, stationary_2d,
                            stationary_analytic)
from .grids import Grid1D, Grid2D, make_grid, make_grid_2d
from .metrics import (RunArtifacts, RunSummary, coverage, fit_power_law,
                      kl_divergence, mse, policy_entropy, smooth,
                      summarize_run, support_coverage, visitation_density)
from .partition import (ComplexityPoint, EstimationMethod,
                        classical_mc_partition, exact_partition,
                        queries_to_precision, simulated_qae_partition)
from .potentials import (Potential, PotentialKind, eval_potential,
                         gradient_fd, potential_from_spec, reward_profile)
from .qae import (AmplitudeVector, DensityEstimate, QaeConfig, annealed_qae,
                  grover_step, prepare_amplitudes)

__version__ = "0.1.0"
