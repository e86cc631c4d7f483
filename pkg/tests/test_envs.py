"""Analytic-ground-truth environments."""

import numpy as np
import pytest

from flame import numkit as nk
from flame.envs import (Gmm2d, MultiGoalEnv, SoftBandit, mode_coverage,
                        multigoal_step, soft_bandit_oracle,
                        wasserstein1_to_oracle)


class TestGmm:
    def test_symmetry(self):
        gmm = Gmm2d()
        for x, y in [(0.3, 0.7), (1.2, -0.4), (2.0, 2.0)]:
            p = gmm.log_density([x, y])
            assert p == pytest.approx(gmm.log_density([-x, y]))
            assert p == pytest.approx(gmm.log_density([x, -y]))

    def test_value_at_mode_center(self):
        gmm = Gmm2d()
        # direct mixture evaluation at (1, 1)
        sig2 = 0.25
        d2 = np.array([0.0, 4.0, 4.0, 8.0])
        want = np.log(np.sum(np.exp(-d2 / (2 * sig2)))
                      / (4 * 2 * np.pi * sig2))
        assert gmm.log_density([1.0, 1.0]) == pytest.approx(want, rel=1e-12)

    def test_far_field_tail(self):
        assert Gmm2d().log_density([100.0, 0.0]) < -1000.0

    def test_density_integrates_to_one(self):
        assert Gmm2d().grid_integral() == pytest.approx(1.0, abs=1e-3)

    def test_samples_cover_all_modes(self):
        gmm = Gmm2d()
        s = gmm.sample(nk.Rng(0), 4000)
        frac, _ = mode_coverage(s, gmm.modes, radius=1.0)
        assert np.all(frac > 0.15)


class TestMultiGoal:
    def test_dynamics_and_reward_at_goal(self):
        env = MultiGoalEnv()
        s2, r, _ = multigoal_step(env, [4.0, 5.0], [1.0, 0.0])
        np.testing.assert_array_equal(s2, [5.0, 5.0])
        # cross terms from goals 10 apart are < e^-50
        assert r == pytest.approx(1.0, abs=1e-20)

    def test_reward_symmetric_at_origin(self):
        env = MultiGoalEnv()
        _, r, _ = multigoal_step(env, [0.0, 0.0], [0.0, 0.0])
        single = np.exp(-50.0 / env.reward_sigma ** 2)
        assert r == pytest.approx(4.0 * single)

    def test_zero_action_keeps_state(self):
        env = MultiGoalEnv()
        s2, _, _ = multigoal_step(env, [1.0, -2.0], [0.0, 0.0])
        np.testing.assert_array_equal(s2, [1.0, -2.0])

    def test_actions_clipped_to_box(self):
        env = MultiGoalEnv()
        s2, _, _ = multigoal_step(env, [0.0, 0.0], [5.0, -5.0])
        np.testing.assert_array_equal(s2, [1.0, -1.0])

    def test_episode_terminates_at_horizon(self):
        env = MultiGoalEnv()
        rng = nk.Rng(1)
        env.reset(rng)
        done = False
        steps = 0
        while not done:
            _, _, done = env.step([0.0, 0.01])
            steps += 1
        assert steps == env.horizon

    def test_episode_terminates_at_goal(self):
        env = MultiGoalEnv()
        env.reset(nk.Rng(2))
        env._state = np.array([4.2, 5.0])
        _, _, done = env.step([1.0, 0.0])
        assert done

    def test_reward_bounded(self):
        env = MultiGoalEnv()
        rng = nk.Rng(3)
        pts = rng.uniform(-8.0, 8.0, (2000, 2))
        rewards = np.array([env.reward(p) for p in pts])
        assert np.all(rewards > 0.0) and np.all(rewards <= 4.0)
        assert env.reward([5.0, 5.0]) == pytest.approx(rewards.max(), abs=1.0)


class TestModeCoverage:
    def test_single_goal_concentration(self):
        goals = MultiGoalEnv().goals
        pts = np.tile(goals[0], (50, 1))
        frac, any_hit = mode_coverage(pts, goals, 0.5)
        np.testing.assert_array_equal(frac, [1.0, 0.0, 0.0, 0.0])
        assert any_hit

    def test_uniform_assignment(self):
        goals = MultiGoalEnv().goals
        pts = np.repeat(goals, 25, axis=0)
        frac, _ = mode_coverage(pts, goals, 0.5)
        np.testing.assert_allclose(frac, 0.25)

    def test_no_coverage_flag(self):
        goals = MultiGoalEnv().goals
        pts = np.zeros((10, 2))
        frac, any_hit = mode_coverage(pts, goals, 0.5)
        np.testing.assert_array_equal(frac, np.zeros(4))
        assert not any_hit


class TestSoftBandit:
    def test_constant_q_gives_uniform_oracle(self):
        class FlatBandit(SoftBandit):
            def q_values(self, actions):
                a = np.asarray(actions, dtype=np.float64)
                if a.ndim and a.shape[-1] == 1:
                    a = a[..., 0]
                return np.ones_like(a)

        oracle = soft_bandit_oracle(FlatBandit(), alpha=0.5)
        np.testing.assert_allclose(oracle.pdf, 0.5, rtol=1e-12)

    def test_oracle_mass_normalized(self):
        oracle = soft_bandit_oracle(SoftBandit(), alpha=0.2)
        mass = np.trapezoid(oracle.pdf, oracle.grid)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_large_alpha_approaches_uniform(self):
        bandit = SoftBandit()
        q = bandit.q_values(np.linspace(-1, 1, 2001))
        alpha = 1e3 * (q.max() - q.min())
        oracle = soft_bandit_oracle(bandit, alpha=alpha)
        tv = 0.5 * np.trapezoid(np.abs(oracle.pdf - 0.5), oracle.grid)
        assert tv < 0.01

    def test_symmetric_modes_have_equal_mass(self):
        oracle = soft_bandit_oracle(SoftBandit(), alpha=0.2, grid_n=4001)
        cdf = oracle.cdf()
        left_mass = cdf[np.searchsorted(oracle.grid, 0.0)]
        assert left_mass == pytest.approx(0.5, abs=1e-6)

    def test_entropy_increases_with_alpha(self):
        bandit = SoftBandit()
        ents = [soft_bandit_oracle(bandit, alpha=a).entropy()
                for a in (0.05, 0.1, 0.2, 0.5, 1.0)]
        assert np.all(np.diff(ents) > 0)

    def test_wasserstein_of_oracle_samples_is_small(self):
        # inverse-CDF draws from the oracle itself should sit within ~grid error
        oracle = soft_bandit_oracle(SoftBandit(), alpha=0.2, grid_n=4001)
        u = nk.Rng(4).random(20_000)
        samples = np.interp(u, oracle.cdf(), oracle.grid)
        assert wasserstein1_to_oracle(samples, oracle) < 0.01

    def test_wasserstein_detects_mode_collapse(self):
        oracle = soft_bandit_oracle(SoftBandit(), alpha=0.2)
        collapsed = np.full(5000, 0.5) + 0.02 * nk.Rng(5).standard_normal(5000)
        assert wasserstein1_to_oracle(collapsed, oracle) > 0.3

    def test_grid_too_coarse_rejected(self):
        with pytest.raises(ValueError):
            soft_bandit_oracle(SoftBandit(), alpha=0.2, grid_n=10)
