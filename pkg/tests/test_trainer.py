import numpy as np
import pytest

from mcpg import (
    Identity,
    PolicyParams,
    SampleBatch,
    TrainConfig,
    advantage,
    policy_gradient,
    pretrain_expectation,
    run,
    update,
)
from mcpg.oracle import TabularObjective, brute_force_min, exact_loss_and_grad, spin_matrix
from mcpg.policy import THETA_CLAMP

from conftest import random_maxcut, random_qubo, random_spins


def make_batches(raw, fvals, per_batch):
    out = []
    for i in range(len(raw) // per_batch):
        s = slice(i * per_batch, (i + 1) * per_batch)
        out.append(SampleBatch(i, raw[s], raw[s].copy(), fvals[s]))
    return out


class TestAdvantage:
    def test_constant_values_zero(self, rng):
        p = PolicyParams(np.zeros(4))
        raw = random_spins(rng, (6, 4))
        batches = make_batches(raw, np.full(6, 3.5), 3)
        assert np.allclose(advantage(batches, p, 0.0), 0.0)

    def test_two_samples_mean_baseline(self, rng):
        p = PolicyParams(np.zeros(2))
        raw = random_spins(rng, (2, 2))
        batches = make_batches(raw, np.array([1.0, 3.0]), 1)
        assert np.allclose(advantage(batches, p, 0.0), [-1.0, 1.0])

    def test_sum_zero_lambda0(self, rng):
        p = PolicyParams(rng.normal(size=8))
        raw = random_spins(rng, (40, 8))
        batches = make_batches(raw, rng.normal(size=40), 8)
        assert advantage(batches, p, 0.0).sum() == pytest.approx(0.0, abs=1e-9)

    def test_empty_rejected(self, rng):
        with pytest.raises(ValueError):
            advantage([], PolicyParams(np.zeros(2)), 0.0)


class TestPolicyGradient:
    def test_zero_advantages_zero_gradient(self, rng):
        p = PolicyParams(rng.normal(size=5))
        raw = random_spins(rng, (12, 5))
        batches = make_batches(raw, np.zeros(12), 4)
        g = policy_gradient(batches, np.zeros(12), p)
        assert np.allclose(g, 0.0)

    def test_estimator_matches_exact_gradient(self):
        # identity filter, lambda = 0, i.i.d. samples: the estimator is a
        # consistent estimate of the enumerated gradient
        rng = np.random.default_rng(99)
        n = 6
        obj = TabularObjective.random(n, rng)
        p = PolicyParams(rng.normal(scale=0.5, size=n))
        _, exact = exact_loss_and_grad(p, obj, 0.0, Identity())
        km = 200_000
        X = p.sample_direct(km, rng)
        f = obj.value_batch(X)
        batches = make_batches(X, f, km // 4)
        a = advantage(batches, p, 0.0)
        g = policy_gradient(batches, a, p)
        rel = np.linalg.norm(g - exact) / np.linalg.norm(exact)
        assert rel <= 0.05

    def test_estimator_unbiased_over_200_batches(self):
        # mean over 200 independent batches sits within 3 standard errors
        # of the enumerated gradient, coordinate-wise
        rng = np.random.default_rng(314)
        n = 8
        obj = TabularObjective.random(n, rng)
        p = PolicyParams(rng.normal(scale=0.7, size=n))
        _, exact = exact_loss_and_grad(p, obj, 0.0, Identity())
        estimates = []
        for _ in range(200):
            X = p.sample_direct(2000, rng)
            f = obj.value_batch(X)
            a = f - f.mean()
            estimates.append((a[:, None] * p.grad_log_prob_batch(X)).mean(axis=0))
        estimates = np.array(estimates)
        mean = estimates.mean(axis=0)
        se = estimates.std(axis=0, ddof=1) / np.sqrt(200)
        assert np.all(np.abs(mean - exact) <= 3.0 * se)

    def test_baseline_shift_invariance_exact(self, rng):
        # weighting by exact probabilities, a constant advantage shift
        # leaves the gradient unchanged (score has zero mean)
        n = 6
        obj = TabularObjective.random(n, rng)
        p = PolicyParams(rng.normal(size=n))
        X = spin_matrix(n)
        w = np.exp(p.log_prob_batch(X))
        G = p.grad_log_prob_batch(X)
        f = obj.value_batch(X)
        for c in (0.0, 1.0, -17.3):
            g_c = (w * (f + c)) @ G
            if c == 0.0:
                g0 = g_c
            else:
                assert np.abs(g_c - g0).max() < 1e-10

    def test_shape_mismatch(self, rng):
        p = PolicyParams(np.zeros(4))
        raw = random_spins(rng, (6, 4))
        batches = make_batches(raw, np.zeros(6), 3)
        with pytest.raises(ValueError):
            policy_gradient(batches, np.zeros(5), p)


class TestUpdate:
    def test_zero_gradient_no_change(self):
        p = PolicyParams(np.array([0.3, -0.2]))
        q = update(p, np.zeros(2), eta=1.0)
        assert np.array_equal(p.theta, q.theta)

    def test_basis_direction(self):
        p = PolicyParams(np.zeros(3))
        q = update(p, np.array([1.0, 0.0, 0.0]), eta=1.0)
        assert np.allclose(q.theta, [-1.0, 0.0, 0.0])

    def test_clamping_after_update(self):
        p = PolicyParams(np.array([29.5]))
        q = update(p, np.array([-100.0]), eta=1.0)
        assert q.theta[0] == THETA_CLAMP

    def test_nonfinite_rejected(self):
        p = PolicyParams(np.zeros(2))
        with pytest.raises(ValueError):
            update(p, np.array([np.nan, 0.0]), eta=0.1)
        with pytest.raises(ValueError):
            update(p, np.zeros(2), eta=0.0)


class TestRun:
    def test_triangle_all_variants(self, triangle):
        for variant in ("mcpg", "mcpg-u", "mcpg-p"):
            cfg = TrainConfig(epochs=20, variant=variant, seed=5,
                              pretrain_epochs=10)
            res = run(cfg, triangle)
            assert res.best_value == -2.0
            assert triangle.value(res.best_solution) == -2.0

    def test_constant_objective_immediate(self, rng):
        obj = TabularObjective.constant(6, 4.2)
        res = run(TrainConfig(epochs=3, seed=0), obj)
        assert res.best_value == 4.2
        assert res.history[0]["best_value"] == 4.2

    def test_incumbent_monotone(self, rng):
        obj = random_maxcut(rng, n=12)
        res = run(TrainConfig(epochs=30, seed=2), obj)
        bests = [h["best_value"] for h in res.history]
        assert np.all(np.diff(bests) <= 0)
        assert res.best_value == min(h["batch_best"] for h in res.history)

    def test_deterministic_given_seed(self, rng):
        obj = random_qubo(rng, n=10)
        r1 = run(TrainConfig(epochs=10, seed=33), obj)
        r2 = run(TrainConfig(epochs=10, seed=33), obj)
        assert r1.best_value == r2.best_value
        assert np.array_equal(r1.best_solution, r2.best_solution)
        assert r1.history == r2.history

    def test_start_reseeding_invariant(self, rng):
        obj = random_maxcut(rng, n=10)
        seen = []

        def cb(epoch, info):
            for i, b in enumerate(info["batches"]):
                assert obj.value(info["starts"][i]) == b.filtered_values.min()
            seen.append(epoch)

        run(TrainConfig(epochs=5, seed=1), obj, epoch_callback=cb)
        assert seen == [1, 2, 3, 4, 5]

    def test_finds_optimum_small_qubo(self, rng):
        found = 0
        for trial in range(10):
            obj = random_qubo(rng, n=12)
            _, fstar, _ = brute_force_min(obj)
            res = run(TrainConfig(epochs=60, seed=trial, target_value=fstar), obj)
            found += res.best_value == fstar
        assert found >= 9

    def test_variant_uniform_never_updates(self, rng):
        obj = random_maxcut(rng, n=8)
        params_seen = []
        run(
            TrainConfig(epochs=5, variant="mcpg-u", seed=0),
            obj,
            epoch_callback=lambda e, info: params_seen.append(info["params"]),
        )
        for p in params_seen:
            assert np.all(p.theta == 0.0)
            assert np.allclose(p.probs(), 0.5)

    def test_variant_pretrained_frozen(self, rng):
        obj = random_maxcut(rng, n=8)
        params_seen = []
        run(
            TrainConfig(epochs=4, variant="mcpg-p", seed=0, pretrain_epochs=5),
            obj,
            epoch_callback=lambda e, info: params_seen.append(info["params"].theta),
        )
        for th in params_seen[1:]:
            assert np.array_equal(th, params_seen[0])

    def test_adam_switch_runs(self, rng):
        obj = random_maxcut(rng, n=8)
        res = run(TrainConfig(epochs=5, optimizer="adam", seed=0), obj)
        assert np.isfinite(res.best_value)

    def test_km_one_warns(self, rng):
        obj = random_maxcut(rng, n=6)
        with pytest.warns(UserWarning):
            run(TrainConfig(epochs=2, starts=1, chains=1, seed=0), obj)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(variant="bogus")
        with pytest.raises(ValueError):
            TrainConfig(step_c=0.0)
        with pytest.raises(ValueError):
            TrainConfig(lambda_decay=0.0)


class TestErrorScaling:
    def test_standard_error_halves_with_4x_samples(self):
        # estimator RMS error should scale like 1/sqrt(samples)
        rng = np.random.default_rng(7)
        n = 6
        obj = TabularObjective.random(n, rng)
        p = PolicyParams(rng.normal(scale=0.5, size=n))
        _, exact = exact_loss_and_grad(p, obj, 0.0, Identity())

        def rms_error(km, trials):
            errs = []
            for _ in range(trials):
                X = p.sample_direct(km, rng)
                f = obj.value_batch(X)
                a = f - f.mean()
                g = (a[:, None] * p.grad_log_prob_batch(X)).mean(axis=0)
                errs.append(np.sum((g - exact) ** 2))
            return np.sqrt(np.mean(errs))

        e1 = rms_error(4_000, 48)
        e2 = rms_error(16_000, 48)
        assert 1.5 <= e1 / e2 <= 2.5


class TestPretrain:
    def test_linear_objective_drives_mu_to_floor(self, rng):
        from mcpg import QuadraticSpinObjective

        n = 6
        obj = QuadraticSpinObjective(np.zeros((n, n)), b=np.ones(n))
        p = PolicyParams.uniform(n, alpha=0.2)
        p = pretrain_expectation(p, obj, 150, np.random.default_rng(0),
                                 samples=256, step_c=0.3)
        # minimizing E[sum x_i] pushes every mu to the alpha floor
        assert np.all(p.probs() < 0.25)

    def test_constant_objective_no_drift(self, rng):
        obj = TabularObjective.constant(5, 1.0)
        p = PolicyParams.uniform(5)
        q = pretrain_expectation(p, obj, 20, np.random.default_rng(1))
        assert np.array_equal(p.theta, q.theta)  # zero advantages exactly

    def test_exact_descent_small_eta(self, rng):
        # following the enumerated gradient with small steps cannot
        # increase the exact expected value
        n = 6
        obj = TabularObjective.random(n, rng)
        p = PolicyParams(rng.normal(scale=0.3, size=n))
        losses = []
        for _ in range(40):
            L, g = exact_loss_and_grad(p, obj, 0.0, Identity())
            losses.append(L)
            p = update(p, g, eta=0.05)
        assert np.all(np.diff(losses) <= 1e-12)
