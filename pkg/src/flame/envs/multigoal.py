"""Velocity-controlled 2-D navigation with four symmetric reward bumps.

Reward at the next position is a mixture of unnormalized Gaussians around
the goals (+-5, +-5); an episode ends on reaching a goal radius or at the
horizon.  The four-way symmetry makes mode coverage of the terminal states
a direct readout of whether a policy explores all optima or collapses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..numkit import Rng

_GOALS = np.array([[5.0, 5.0], [5.0, -5.0], [-5.0, 5.0], [-5.0, -5.0]])


@dataclass
class MultiGoalEnv:
    goals: np.ndarray = field(default_factory=lambda: _GOALS.copy())
    reward_sigma: float = 2.5
    horizon: int = 30
    goal_radius: float = 0.5
    start_half_width: float = 0.5

    state_dim = 2
    action_dim = 2
    action_lo = np.array([-1.0, -1.0])
    action_hi = np.array([1.0, 1.0])

    def __post_init__(self):
        self._state = np.zeros(2)
        self._steps = 0

    def reset(self, rng: Rng) -> np.ndarray:
        self._state = rng.uniform(-self.start_half_width,
                                  self.start_half_width, 2)
        self._steps = 0
        return self._state.copy()

    def reward(self, position) -> float:
        d2 = np.sum((self.goals - np.asarray(position)) ** 2, axis=1)
        return float(np.sum(np.exp(-d2 / self.reward_sigma ** 2)))

    def step(self, action):
        """(s', r, done); the action is clipped to the box before moving."""
        a = np.clip(np.asarray(action, dtype=np.float64),
                    self.action_lo, self.action_hi)
        self._state = self._state + a
        self._steps += 1
        r = self.reward(self._state)
        at_goal = bool(np.any(
            np.linalg.norm(self.goals - self._state, axis=1)
            <= self.goal_radius))
        done = at_goal or self._steps >= self.horizon
        return self._state.copy(), r, done


def multigoal_step(env: MultiGoalEnv, s, a):
    """Stateless transition: dynamics s' = s + clip(a), reward at s'."""
    env._state = np.asarray(s, dtype=np.float64).copy()
    env._steps = 0
    return env.step(a)


def rollout_batch(env: MultiGoalEnv, policy_fn, rng: Rng, n_episodes: int):
    """Run episodes in lockstep with a batched policy.

    ``policy_fn(states) -> actions`` is queried once per step for all live
    episodes.  Returns (returns, terminal_states) arrays.
    """
    states = rng.uniform(-env.start_half_width, env.start_half_width,
                         (n_episodes, 2))
    returns = np.zeros(n_episodes)
    terminal = states.copy()
    active = np.ones(n_episodes, dtype=bool)
    for _ in range(env.horizon):
        if not active.any():
            break
        acts = np.clip(np.asarray(policy_fn(states[active]),
                                  dtype=np.float64),
                       env.action_lo, env.action_hi)
        nxt = states[active] + acts
        d2 = np.sum((nxt[:, None, :] - env.goals[None, :, :]) ** 2, axis=-1)
        rew = np.sum(np.exp(-d2 / env.reward_sigma ** 2), axis=1)
        returns[active] += rew
        at_goal = np.any(np.sqrt(d2) <= env.goal_radius, axis=1)
        idx = np.flatnonzero(active)
        states[idx] = nxt
        terminal[idx] = nxt
        active[idx[at_goal]] = False
    return returns, terminal


def mode_coverage(terminal_states, goals, radius: float):
    """Fraction of rollouts ending within ``radius`` of each goal.

    Returns (fractions, any_covered); the flag is False when every rollout
    ended away from all goals.
    """
    pts = np.asarray(terminal_states, dtype=np.float64)
    goals = np.asarray(goals, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need at least one terminal state")
    dist = np.linalg.norm(pts[:, None, :] - goals[None, :, :], axis=-1)
    hits = dist <= radius
    fractions = hits.mean(axis=0)
    return fractions, bool(hits.any())
