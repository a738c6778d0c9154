import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcpg import PolicyParams
from mcpg.oracle import spin_matrix


def fd_grad_log_prob(params, x, eps=1e-5):
    """Central finite differences of log_prob; independent of the closed form."""
    g = np.zeros(params.n)
    for i in range(params.n):
        tp = params.theta.copy()
        tp[i] += eps
        tm = params.theta.copy()
        tm[i] -= eps
        g[i] = (
            PolicyParams(tp, params.alpha).log_prob(x)
            - PolicyParams(tm, params.alpha).log_prob(x)
        ) / (2 * eps)
    return g


class TestProbs:
    def test_symmetric_point(self):
        p = PolicyParams(np.zeros(3), alpha=0.2)
        assert np.allclose(p.probs(), 0.5)

    def test_saturation_at_ceiling(self):
        p = PolicyParams(np.full(4, 1e9), alpha=0.2)
        assert np.all(p.probs() < 0.8)
        assert np.allclose(p.probs(), 0.8, atol=1e-12)

    def test_closed_form_at_one(self):
        # frozen from direct evaluation: 0.6 / (1 + e^-1) + 0.2
        p = PolicyParams(np.array([1.0]), alpha=0.2)
        assert p.probs()[0] == pytest.approx(0.638635147178003, abs=1e-12)

    def test_monotone_in_theta(self):
        thetas = np.linspace(-8, 8, 33)
        mus = [PolicyParams(np.array([t])).probs()[0] for t in thetas]
        assert np.all(np.diff(mus) > 0)

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=8),
           st.floats(0.0, 0.49))
    @settings(max_examples=50, deadline=None)
    def test_range_strict(self, theta, alpha):
        mu = PolicyParams(np.array(theta), alpha).probs()
        assert np.all(mu > alpha) and np.all(mu < 1 - alpha)

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            PolicyParams(np.zeros(2), alpha=0.5)
        with pytest.raises(ValueError):
            PolicyParams(np.zeros(2), alpha=-0.1)


class TestLogProb:
    def test_uniform_product(self):
        p = PolicyParams(np.zeros(4))
        x = np.array([1, -1, 1, -1], dtype=np.int8)
        assert p.log_prob(x) == pytest.approx(4 * math.log(0.5), abs=1e-12)

    def test_single_bernoulli(self):
        # alpha = 0: theta = logit(0.8) gives mu = 0.8 exactly
        theta = math.log(0.8 / 0.2)
        p = PolicyParams(np.array([theta]), alpha=0.0)
        assert p.log_prob(np.array([1], dtype=np.int8)) == pytest.approx(
            math.log(0.8), abs=1e-12
        )
        assert p.log_prob(np.array([-1], dtype=np.int8)) == pytest.approx(
            math.log(0.2), abs=1e-12
        )

    def test_nonpositive(self, rng):
        p = PolicyParams(rng.normal(size=6))
        X = spin_matrix(6)
        assert np.all(p.log_prob_batch(X) <= 0)

    def test_normalization_by_enumeration(self, rng):
        for n in (4, 8, 12):
            p = PolicyParams(rng.normal(scale=2.0, size=n))
            total = math.fsum(np.exp(p.log_prob_batch(spin_matrix(n))))
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_dimension_mismatch(self):
        p = PolicyParams(np.zeros(3))
        with pytest.raises(ValueError):
            p.log_prob(np.array([1, -1], dtype=np.int8))


class TestGradLogProb:
    def test_symmetric_point_value(self):
        # d/dtheta log mu at theta=0, alpha=0.2: (1/0.5) * 0.6 * 0.25 = 0.3
        p = PolicyParams(np.zeros(2), alpha=0.2)
        g = p.grad_log_prob(np.array([1, -1], dtype=np.int8))
        assert g[0] == pytest.approx(0.3, abs=1e-12)
        assert g[1] == pytest.approx(-0.3, abs=1e-12)  # sign symmetry

    def test_matches_finite_differences(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 9))
            p = PolicyParams(rng.normal(scale=2.0, size=n), alpha=0.2)
            x = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
            g = p.grad_log_prob(x)
            fd = fd_grad_log_prob(p, x)
            assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(fd), 1e-12)

    def test_score_identity(self, rng):
        # E[grad log p] = 0 over the full hypercube
        for n in (4, 8):
            p = PolicyParams(rng.normal(size=n))
            X = spin_matrix(n)
            w = np.exp(p.log_prob_batch(X))
            mean_score = w @ p.grad_log_prob_batch(X)
            assert np.abs(mean_score).max() < 1e-8

    def test_dimension_mismatch(self):
        p = PolicyParams(np.zeros(3))
        with pytest.raises(ValueError):
            p.grad_log_prob(np.array([1, -1], dtype=np.int8))


class TestSampleDirect:
    def test_degenerate_all_plus(self, rng):
        p = PolicyParams(np.full(5, 1e9), alpha=0.0)
        X = p.sample_direct(100, rng)
        assert np.all(X == 1)

    def test_law_of_large_numbers(self):
        p = PolicyParams(np.zeros(1))
        X = p.sample_direct(100_000, np.random.default_rng(0))
        assert np.mean(X > 0) == pytest.approx(0.5, abs=0.01)

    def test_determinism(self):
        p = PolicyParams(np.linspace(-1, 1, 6))
        a = p.sample_direct(50, np.random.default_rng(42))
        b = p.sample_direct(50, np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_count_validation(self, rng):
        with pytest.raises(ValueError):
            PolicyParams(np.zeros(2)).sample_direct(0, rng)
