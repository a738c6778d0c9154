"""Policy-gradient driver: sample, filter, estimate the gradient, update.

Each epoch draws k*m chain samples, applies the filter, computes the
advantage of every sample

    A(s) = f(T(s)) + lambda * log p(s) - mean f(T(.)),

estimates the gradient as the advantage-weighted mean of the score
function, and takes an SGD step with stepsize c * sqrt(m*k) / sqrt(t).
Chain starts are re-seeded each epoch with the best filtered sample of
their own batch, and the entropy weight lambda decays geometrically.

Variants: ``mcpg`` trains the policy; ``mcpg-u`` samples from the fixed
uniform policy (mu = 0.5) and never updates; ``mcpg-p`` pretrains the
policy on the plain expected objective with direct sampling, then
freezes it.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .filters import FilterKind, LocalSearch
from .policy import PolicyParams
from .problems.base import Objective
from .sampler import SampleBatch, sample_batches

__all__ = [
    "TrainConfig",
    "TrainResult",
    "advantage",
    "policy_gradient",
    "update",
    "run",
    "pretrain_expectation",
]

VARIANTS = ("mcpg", "mcpg-u", "mcpg-p")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    starts: int = 8          # k: number of chain starting points
    chains: int = 16         # m: chains per start
    transitions: int = 10    # t: MH transitions per chain
    alpha: float = 0.2
    filter_kind: FilterKind = field(default_factory=LocalSearch)
    variant: str = "mcpg"
    lambda0: float | None = None   # None: 0.1 * spread of first-epoch values
    lambda_decay: float = 0.97
    step_c: float = 0.1
    optimizer: str = "sgd"         # "sgd" or "adam"
    pretrain_epochs: int = 50      # mcpg-p only
    seed: int = 0
    target_value: float | None = None   # stop early once best_value <= target
    time_budget: float | None = None    # wall-clock seconds; checked per epoch

    def __post_init__(self):
        if min(self.epochs, self.starts, self.chains, self.transitions) < 1:
            raise ValueError("epochs, starts, chains, transitions must all be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.lambda0 is not None and self.lambda0 < 0:
            raise ValueError("lambda0 must be >= 0")
        if not 0 < self.lambda_decay <= 1:
            raise ValueError("lambda_decay must be in (0, 1]")
        if self.step_c <= 0:
            raise ValueError("step_c must be > 0")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError("optimizer must be 'sgd' or 'adam'")

    def step_size(self, epoch: int) -> float:
        return self.step_c * np.sqrt(self.chains * self.starts) / np.sqrt(epoch)


@dataclass
class TrainResult:
    best_solution: np.ndarray
    best_value: float
    history: list
    lambda0: float
    params: PolicyParams
    config: TrainConfig


def _flatten(batches: list[SampleBatch]):
    raw = np.concatenate([b.raw for b in batches])
    fvals = np.concatenate([b.filtered_values for b in batches])
    return raw, fvals


def advantage(batches: list[SampleBatch], params: PolicyParams, lam: float) -> np.ndarray:
    """Per-sample advantages; they sum to zero when lambda = 0."""
    if not batches:
        raise ValueError("empty batch list")
    raw, fvals = _flatten(batches)
    a = fvals - fvals.mean()
    if lam != 0.0:
        a = a + lam * params.log_prob_batch(raw)
    return a


def policy_gradient(
    batches: list[SampleBatch], advantages: np.ndarray, params: PolicyParams
) -> np.ndarray:
    """Advantage-weighted mean score over all k*m raw samples."""
    raw, _ = _flatten(batches)
    advantages = np.asarray(advantages, dtype=np.float64)
    if advantages.shape != (raw.shape[0],):
        raise ValueError("advantages do not match the sample count")
    G = params.grad_log_prob_batch(raw)
    return (advantages[:, None] * G).mean(axis=0)


def update(params: PolicyParams, gradient: np.ndarray, eta: float) -> PolicyParams:
    """One SGD step; the new logits are clamped by the policy constructor."""
    gradient = np.asarray(gradient, dtype=np.float64)
    if gradient.shape != (params.n,):
        raise ValueError("gradient has the wrong shape")
    if not np.all(np.isfinite(gradient)):
        raise ValueError("gradient has non-finite entries")
    if eta <= 0:
        raise ValueError("eta must be > 0")
    return params.replace_theta(params.theta - eta * gradient)


class _Adam:
    def __init__(self, n, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = np.zeros(n)
        self.v = np.zeros(n)
        self.t = 0
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def step(self, params: PolicyParams, g: np.ndarray, eta: float) -> PolicyParams:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * g
        self.v = self.beta2 * self.v + (1 - self.beta2) * g * g
        mhat = self.m / (1 - self.beta1**self.t)
        vhat = self.v / (1 - self.beta2**self.t)
        return params.replace_theta(
            params.theta - eta * mhat / (np.sqrt(vhat) + self.eps)
        )


def pretrain_expectation(
    params: PolicyParams,
    obj: Objective,
    epochs: int,
    rng: np.random.Generator,
    *,
    samples: int = 128,
    step_c: float = 0.1,
) -> PolicyParams:
    """Train the policy on the plain expected objective (no entropy term).

    Direct i.i.d. sampling, identity filter.  This is the warm-up used
    by the pretrained-policy variant.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    for epoch in range(1, epochs + 1):
        X = params.sample_direct(samples, rng)
        f = obj.value_batch(X)
        a = f - f.mean()
        G = params.grad_log_prob_batch(X)
        g = (a[:, None] * G).mean(axis=0)
        params = update(params, g, step_c * np.sqrt(samples) / np.sqrt(epoch))
    return params


def run(
    config: TrainConfig,
    obj: Objective,
    epoch_callback: Callable[[int, dict], None] | None = None,
) -> TrainResult:
    """Full training loop; deterministic given config.seed.

    Returns the best filtered sample seen over all epochs, its value,
    and the per-epoch history (incumbent, batch stats, gradient norm).
    """
    k, m = config.starts, config.chains
    if k * m == 1:
        warnings.warn(
            "k*m = 1: the centered advantage is identically zero, so the "
            "policy parameters will never move",
            stacklevel=2,
        )
    t_start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    params = PolicyParams.uniform(obj.n, config.alpha)

    trains_policy = config.variant == "mcpg"
    if config.variant == "mcpg-p":
        params = pretrain_expectation(
            params,
            obj,
            config.pretrain_epochs,
            rng,
            samples=k * m,
            step_c=config.step_c,
        )

    starts = params.sample_direct(k, rng)
    adam = _Adam(obj.n) if config.optimizer == "adam" else None

    best_x: np.ndarray | None = None
    best_v = np.inf
    lam0 = config.lambda0
    history: list[dict] = []

    for epoch in range(1, config.epochs + 1):
        batches = sample_batches(
            params,
            obj,
            starts,
            t=config.transitions,
            m=m,
            filter_kind=config.filter_kind,
            rng=rng,
        )
        _, fvals = _flatten(batches)
        j = int(np.argmin(fvals))
        if fvals[j] < best_v:
            best_v = float(fvals[j])
            best_x = np.concatenate([b.filtered for b in batches])[j].copy()

        if lam0 is None:
            lam0 = 0.1 * float(fvals.max() - fvals.min())
        lam = lam0 * config.lambda_decay ** (epoch - 1)

        grad_norm = 0.0
        if trains_policy:
            a = advantage(batches, params, lam)
            g = policy_gradient(batches, a, params)
            grad_norm = float(np.linalg.norm(g))
            eta = config.step_size(epoch)
            params = adam.step(params, g, eta) if adam else update(params, g, eta)

        # Re-seed each start with the best filtered sample of its batch
        # (first minimum on ties).
        starts = np.stack(
            [b.filtered[int(np.argmin(b.filtered_values))] for b in batches]
        )

        history.append(
            {
                "epoch": epoch,
                "best_value": best_v,
                "batch_best": float(fvals.min()),
                "batch_mean": float(fvals.mean()),
                "grad_norm": grad_norm,
                "lambda": lam,
            }
        )
        if epoch_callback is not None:
            epoch_callback(
                epoch,
                {"batches": batches, "starts": starts, "params": params},
            )
        if config.target_value is not None and best_v <= config.target_value:
            break
        if config.time_budget is not None and time.perf_counter() - t_start > config.time_budget:
            break

    assert best_x is not None
    return TrainResult(
        best_solution=best_x,
        best_value=best_v,
        history=history,
        lambda0=float(lam0),
        params=params,
        config=config,
    )
