"""Maximum-entropy RL with flow-matching policies.

Subpackages:
  kernels  — compiled/numpy hot kernels (selected at import)
  numkit   — tensors, autodiff, random streams, distributions
  netlib   — MLPs, time embeddings, Adam, target tracking, checkpoints
  flowcore — probability paths, flow losses, ODE sampling, log-likelihoods
  maxent   — reverse-sampled Q-reweighted actor/critic training
  envs     — desk-scale tasks with analytic ground truth
  harness  — CLI, configs, runs, sweeps, plots
"""

__version__ = "0.1.0"
