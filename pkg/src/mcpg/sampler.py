"""Parallel Metropolis-Hastings sampling from the product policy.

Proposals flip one uniformly chosen coordinate.  The proposal is
symmetric, so acceptance reduces to min(1, p(x') / p(x)), which for a
product distribution depends only on the flipped coordinate: flipping
i from +1 to -1 is accepted with min(1, (1 - mu_i) / mu_i) and the
reverse with min(1, mu_i / (1 - mu_i)).  With the alpha floor every
proposal is accepted with probability at least alpha / (1 - alpha), so
chains cannot freeze.

All k*m chains advance in lockstep as one array; draws come from a
single generator in a fixed order, so a run is bit-reproducible from
its master seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FilterKind, Identity, apply_filter_batch
from .policy import PolicyParams
from .problems.base import Objective, as_spins

__all__ = ["SampleBatch", "flip_acceptance", "mh_chain", "mh_chains", "sample_batches"]


@dataclass
class SampleBatch:
    """Raw and filtered terminal states of the m chains from one start."""

    start_index: int
    raw: np.ndarray              # (m, n) int8
    filtered: np.ndarray         # (m, n) int8
    filtered_values: np.ndarray  # (m,)


def flip_acceptance(params: PolicyParams, x, i: int) -> float:
    """Acceptance probability of proposing to flip coordinate i of x."""
    x = as_spins(x, params.n)
    mu, co = params._prob_pair()
    ratio = co[i] / mu[i] if x[i] > 0 else mu[i] / co[i]
    return float(min(1.0, ratio))


def mh_chains(params: PolicyParams, starts, t: int, rng: np.random.Generator) -> np.ndarray:
    """Advance one chain per row of ``starts`` by t transitions."""
    if t < 1:
        raise ValueError("t must be >= 1")
    X = np.array(np.atleast_2d(starts), dtype=np.int8, copy=True)
    B, n = X.shape
    if n != params.n:
        raise ValueError("start dimension does not match the policy")
    mu, co = params._prob_pair()
    ratio_plus = co / mu    # acceptance when the current spin is +1
    ratio_minus = mu / co
    idx = rng.integers(0, n, size=(t, B))
    U = rng.random((t, B))
    rows = np.arange(B)
    for s in range(t):
        i = idx[s]
        cur = X[rows, i]
        acc = np.where(cur > 0, ratio_plus[i], ratio_minus[i])
        accept = U[s] < acc
        X[rows[accept], i[accept]] = -cur[accept]
    return X


def mh_chain(params: PolicyParams, start, t: int, rng: np.random.Generator) -> np.ndarray:
    """Single chain: the state after t transitions."""
    start = as_spins(start, params.n)
    return mh_chains(params, start[None, :], t, rng)[0]


def sample_batches(
    params: PolicyParams,
    obj: Objective,
    starts,
    *,
    t: int = 10,
    m: int = 16,
    filter_kind: FilterKind = Identity(),
    rng: np.random.Generator,
) -> list[SampleBatch]:
    """Run m chains from each of the k starts, filter the terminal states.

    Returns one SampleBatch per start; ``filtered_values`` are exact
    re-evaluations of the filtered points.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=np.int8))
    k = starts.shape[0]
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    X0 = np.repeat(starts, m, axis=0)
    X = mh_chains(params, X0, t, rng)
    Xf, vals = apply_filter_batch(filter_kind, obj, X, rng)
    return [
        SampleBatch(
            start_index=i,
            raw=X[i * m : (i + 1) * m],
            filtered=Xf[i * m : (i + 1) * m],
            filtered_values=vals[i * m : (i + 1) * m],
        )
        for i in range(k)
    ]
