"""Random streams, logsumexp, and the truncated-normal sampler."""

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from flame import numkit as nk


class TestRng:
    def test_same_seed_same_draws(self):
        a = nk.Rng(123).standard_normal(16)
        b = nk.Rng(123).standard_normal(16)
        np.testing.assert_array_equal(a, b)

    def test_streams_are_independent_of_call_order(self):
        root = nk.Rng(5)
        x1 = root.stream("env").standard_normal(4)
        y1 = root.stream("actor").standard_normal(4)
        root2 = nk.Rng(5)
        y2 = root2.stream("actor").standard_normal(4)
        x2 = root2.stream("env").standard_normal(4)
        np.testing.assert_array_equal(x1, x2)
        np.testing.assert_array_equal(y1, y2)
        assert not np.allclose(x1, y1)

    def test_state_roundtrip(self):
        r = nk.Rng(9).stream("a")
        r.standard_normal(7)
        vec = r.state_vector()
        expected = r.standard_normal(5)
        r2 = nk.Rng(9).stream("a")
        r2.set_state_vector(vec)
        np.testing.assert_array_equal(r2.standard_normal(5), expected)

    def test_rademacher_values(self):
        vals = nk.Rng(1).rademacher(1000)
        assert set(np.unique(vals)) == {-1.0, 1.0}


class TestLogsumexp:
    def test_uniform(self):
        assert nk.logsumexp(np.zeros(3)) == pytest.approx(np.log(3.0))

    def test_huge_inputs_do_not_overflow(self):
        assert nk.logsumexp(np.array([1000.0, 1000.0])) == pytest.approx(
            1000.0 + np.log(2.0))
        assert np.isfinite(nk.logsumexp(np.array([1e300, 1e300])))

    def test_reference_value(self):
        # sum in extended precision: log(e^1 + e^2 + e^3)
        assert nk.logsumexp(np.array([1.0, 2.0, 3.0])) == pytest.approx(
            3.40760596444438, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            nk.logsumexp(np.array([]))

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=12),
           st.floats(-500, 500))
    @settings(max_examples=200, deadline=None)
    def test_shift_invariance(self, values, c):
        q = np.array(values)
        lhs = nk.logsumexp(q + c)
        rhs = nk.logsumexp(q) + c
        assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-10)

    def test_axis_reduction(self):
        q = np.arange(6.0).reshape(2, 3)
        got = nk.logsumexp(q, axis=1)
        want = np.log(np.sum(np.exp(q), axis=1))
        np.testing.assert_allclose(got, want, rtol=1e-13)


class TestTruncatedNormal:
    def test_untruncated_limit_matches_gaussian_mean(self):
        rng = nk.Rng(2)
        s = nk.truncated_normal(0.0, 1.0, -np.inf, np.inf, rng, size=100_000)
        assert abs(s.mean()) < 3.0 / np.sqrt(100_000)

    def test_half_normal_mean(self):
        rng = nk.Rng(3)
        s = nk.truncated_normal(0.0, 1.0, 0.0, np.inf, rng, size=100_000)
        assert np.all(s >= 0.0)
        assert s.mean() == pytest.approx(np.sqrt(2.0 / np.pi), rel=0.01)

    def test_far_tail_window_support(self):
        rng = nk.Rng(4)
        s = nk.truncated_normal(5.0, 1.0, -1.0, 1.0, rng, size=10_000)
        assert np.all(s >= -1.0) and np.all(s <= 1.0)
        assert np.all(np.isfinite(s))

    def test_extreme_tail_is_finite(self):
        rng = nk.Rng(5)
        s = nk.truncated_normal(0.0, 1.0, 40.0, 41.0, rng, size=1000)
        assert np.all((s >= 40.0) & (s <= 41.0))

    def test_invalid_window_rejected(self):
        with pytest.raises(ValueError):
            nk.TruncatedNormalSpec(np.zeros(2), np.ones(2),
                                   np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            nk.TruncatedNormalSpec(np.zeros(1), np.zeros(1),
                                   np.zeros(1), np.ones(1))

    @pytest.mark.parametrize("mean,std,lo,hi", [
        (0.0, 1.0, -1.0, 2.0),
        (2.0, 0.5, 1.0, 4.0),
        (0.0, 1.0, 3.0, np.inf),
        (-1.0, 2.0, -np.inf, 0.0),
    ])
    def test_empirical_cdf_matches_analytic(self, mean, std, lo, hi):
        rng = nk.Rng(hash((mean, std, lo, hi)) % (2 ** 31))
        s = nk.truncated_normal(mean, std, lo, hi, rng, size=100_000)
        a, b = (lo - mean) / std, (hi - mean) / std
        ks = scipy.stats.kstest(
            s, lambda x: scipy.stats.truncnorm.cdf(x, a, b, mean, std))
        assert ks.statistic < 0.01

    def test_vector_spec_broadcasts(self):
        spec = nk.TruncatedNormalSpec(
            mean=np.array([0.0, 5.0]), std=np.array([1.0, 1.0]),
            lo=np.array([0.0, -1.0]), hi=np.array([np.inf, 1.0]))
        s = nk.sample_truncated_normal(spec, nk.Rng(8), size=1000)
        assert s.shape == (1000, 2)
        assert np.all(s[:, 0] >= 0.0)
        assert np.all((s[:, 1] >= -1.0) & (s[:, 1] <= 1.0))
