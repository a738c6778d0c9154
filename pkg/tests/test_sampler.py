import math

import numpy as np
import pytest

from mcpg import (
    Identity,
    KFlip,
    PolicyParams,
    flip,
    flip_acceptance,
    mh_chain,
    mh_chains,
    sample_batches,
)
from mcpg.oracle import rank_of, spin_matrix

from conftest import random_maxcut, random_spins


class TestAcceptance:
    def test_uniform_target_always_accepts(self, rng):
        p = PolicyParams(np.zeros(6))
        x = random_spins(rng, 6)
        for i in range(6):
            assert flip_acceptance(p, x, i) == 1.0

    def test_matches_density_ratio(self, rng):
        # the per-coordinate shortcut must equal the full MH ratio
        for _ in range(50):
            n = int(rng.integers(2, 8))
            p = PolicyParams(rng.normal(scale=2, size=n))
            x = random_spins(rng, n)
            i = int(rng.integers(n))
            full = min(1.0, math.exp(p.log_prob(flip(x, i)) - p.log_prob(x)))
            assert flip_acceptance(p, x, i) == pytest.approx(full, rel=1e-12)

    def test_diversity_floor(self, rng):
        # with alpha = 0.2 no proposal is accepted with prob < 0.25
        p = PolicyParams(rng.normal(scale=50, size=8), alpha=0.2)
        x = random_spins(rng, 8)
        accs = [flip_acceptance(p, x, i) for i in range(8)]
        assert min(accs) >= 0.25 - 1e-12


class TestDetailedBalance:
    def test_single_flip_pairs(self, rng):
        # p(x) P(x -> x') == p(x') P(x' -> x) for the implemented rule,
        # with P built from exact densities rather than the sampler code
        n = 5
        p = PolicyParams(rng.normal(size=n))
        X = spin_matrix(n)
        dens = np.exp(p.log_prob_batch(X))
        for r in range(2**n):
            x = X[r]
            for i in range(n):
                x2 = flip(x, i)
                r2 = int(rank_of(x2[None, :])[0])
                fwd = dens[r] * (1 / n) * flip_acceptance(p, x, i)
                bwd = dens[r2] * (1 / n) * flip_acceptance(p, x2, i)
                assert fwd == pytest.approx(bwd, rel=1e-10)


class TestChains:
    def test_t_validation(self, rng):
        p = PolicyParams(np.zeros(3))
        with pytest.raises(ValueError):
            mh_chain(p, np.ones(3, dtype=np.int8), 0, rng)

    def test_single_step_changes_at_most_one_coordinate(self, rng):
        p = PolicyParams(np.zeros(8))
        starts = random_spins(rng, (200, 8))
        out = mh_chains(p, starts, 1, rng)
        assert np.all((out != starts).sum(axis=1) <= 1)
        # theta = 0 accepts everything: exactly one coordinate moved
        assert np.all((out != starts).sum(axis=1) == 1)

    def test_two_state_stationary_law(self):
        # n=1, mu=0.8: long-chain empirical P(+1) -> 0.8
        theta = math.log(0.8 / 0.2)
        p = PolicyParams(np.array([theta]), alpha=0.0)
        rng = np.random.default_rng(3)
        starts = np.ones((20_000, 1), dtype=np.int8)
        out = mh_chains(p, starts, 60, rng)
        assert np.mean(out > 0) == pytest.approx(0.8, abs=0.01)

    def test_stationarity_tv_small_n(self):
        # chains started from exact samples stay distributed as p
        rng = np.random.default_rng(11)
        n = 6
        p = PolicyParams(rng.normal(size=n))
        starts = p.sample_direct(150_000, rng)
        out = mh_chains(p, starts, 15, rng)
        emp = np.bincount(rank_of(out), minlength=2**n) / out.shape[0]
        exact = np.exp(p.log_prob_batch(spin_matrix(n)))
        tv = 0.5 * np.abs(emp - exact).sum()
        assert tv <= 0.01

    def test_determinism(self):
        p = PolicyParams(np.linspace(-1, 1, 5))
        starts = np.ones((7, 5), dtype=np.int8)
        a = mh_chains(p, starts, 9, np.random.default_rng(1))
        b = mh_chains(p, starts, 9, np.random.default_rng(1))
        assert np.array_equal(a, b)


class TestSampleBatches:
    def test_shapes_and_invariants(self, rng):
        obj = random_maxcut(rng, n=10)
        p = PolicyParams(np.zeros(10))
        starts = random_spins(rng, (4, 10))
        batches = sample_batches(
            p, obj, starts, t=5, m=6, filter_kind=KFlip(1), rng=rng
        )
        assert len(batches) == 4
        for i, b in enumerate(batches):
            assert b.start_index == i
            assert b.raw.shape == b.filtered.shape == (6, 10)
            assert b.filtered_values.shape == (6,)
            # exact re-evaluation and filter monotonicity
            assert np.array_equal(b.filtered_values, obj.value_batch(b.filtered))
            assert np.all(b.filtered_values <= obj.value_batch(b.raw))

    def test_single_transition_near_floor(self, rng):
        obj = random_maxcut(rng, n=8)
        p = PolicyParams(np.full(8, -50.0), alpha=0.2)  # mu at the alpha floor
        starts = random_spins(rng, (3, 8))
        batches = sample_batches(
            p, obj, starts, t=1, m=5, filter_kind=Identity(), rng=rng
        )
        for i, b in enumerate(batches):
            assert np.all((b.raw != starts[i]).sum(axis=1) <= 1)

    def test_bit_identical_given_seed(self, rng):
        obj = random_maxcut(rng, n=9)
        p = PolicyParams(np.linspace(-1, 1, 9))
        starts = random_spins(rng, (3, 9))

        def draw(seed):
            return sample_batches(
                p, obj, starts, t=4, m=8, filter_kind=KFlip(1),
                rng=np.random.default_rng(seed),
            )

        a, b = draw(77), draw(77)
        for ba, bb in zip(a, b):
            assert np.array_equal(ba.raw, bb.raw)
            assert np.array_equal(ba.filtered, bb.filtered)
            assert np.array_equal(ba.filtered_values, bb.filtered_values)

    def test_counts_validation(self, rng):
        obj = random_maxcut(rng, n=6)
        p = PolicyParams(np.zeros(6))
        with pytest.raises(ValueError):
            sample_batches(p, obj, np.ones((1, 6), dtype=np.int8),
                           t=0, m=2, rng=rng)
        with pytest.raises(ValueError):
            sample_batches(p, obj, np.ones((1, 6), dtype=np.int8),
                           t=1, m=0, rng=rng)
