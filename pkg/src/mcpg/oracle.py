"""Brute-force and exact reference computations for tests and audits.

Everything here enumerates the hypercube, so hard dimension guards keep
calls honest: 24 for scans that need one pass, 20 for stored
distributions, 16 for gradient enumerations.  Spin vectors are indexed
by the rank with bit i = (x_i + 1) / 2, little-endian; all scalar sums
over 2^n terms go through compensated (exact) summation.

None of this is on the solver's hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .filters import (
    FilterKind,
    Identity,
    deterministic_filter_points,
    deterministic_filter_values,
)
from .policy import PolicyParams
from .problems.base import Objective

__all__ = [
    "MAX_BRUTE_N",
    "MAX_DIST_N",
    "MAX_GRAD_N",
    "TabularObjective",
    "ExactDistribution",
    "spin_matrix",
    "rank_of",
    "all_values",
    "brute_force_min",
    "exact_gibbs",
    "exact_loss_and_grad",
    "gap_and_bound",
    "check_prop2",
    "kl_divergence",
    "filter_partition_sizes",
    "filter_kl_report",
]

MAX_BRUTE_N = 24
MAX_DIST_N = 20
MAX_GRAD_N = 16
_CHUNK = 1 << 16


def spin_matrix(n: int, ranks=None) -> np.ndarray:
    """Spin vectors (as rows) for the given ranks, default all 2^n."""
    if ranks is None:
        ranks = np.arange(1 << n, dtype=np.int64)
    bits = (np.asarray(ranks, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    return (2 * bits - 1).astype(np.int8)


def rank_of(X: np.ndarray) -> np.ndarray:
    """Inverse of spin_matrix for rows of X."""
    X = np.atleast_2d(X)
    weights = (np.int64(1) << np.arange(X.shape[1], dtype=np.int64))
    return ((X > 0).astype(np.int64) @ weights)


class TabularObjective(Objective):
    """Explicit table of values indexed by spin rank; test workhorse."""

    def __init__(self, table):
        table = np.asarray(table, dtype=np.float64)
        n = int(round(math.log2(table.size)))
        if 1 << n != table.size:
            raise ValueError("table length must be a power of two")
        self.table = table
        self._n = n

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, scale: float = 1.0):
        return cls(scale * rng.standard_normal(1 << n))

    @classmethod
    def constant(cls, n: int, level: float = 0.0):
        return cls(np.full(1 << n, float(level)))

    @property
    def n(self) -> int:
        return self._n

    def value(self, x) -> float:
        x = self._check_x(x)
        return float(self.table[rank_of(x[None, :])[0]])

    def value_batch(self, X) -> np.ndarray:
        return self.table[rank_of(X)]


@dataclass(frozen=True)
class ExactDistribution:
    """A probability vector over all 2^n spin vectors, rank-indexed."""

    probabilities: np.ndarray
    n: int

    def __post_init__(self):
        if self.n > MAX_DIST_N:
            raise ValueError(f"n={self.n} exceeds the exact-distribution guard")
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.shape != (1 << self.n,):
            raise ValueError("probability vector has the wrong length")
        if p.min() < 0 or abs(math.fsum(p) - 1.0) > 1e-10:
            raise ValueError("not a probability distribution")
        object.__setattr__(self, "probabilities", p)


def all_values(obj: Objective) -> np.ndarray:
    """f(x) for every spin vector, rank-indexed; chunked scan."""
    n = obj.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"n={n} exceeds the enumeration guard ({MAX_BRUTE_N})")
    total = 1 << n
    out = np.empty(total)
    for lo in range(0, total, _CHUNK):
        ranks = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        out[lo : lo + ranks.size] = obj.value_batch(spin_matrix(n, ranks))
    return out


def brute_force_min(obj: Objective):
    """Global minimizer, optimal value, and the number of optima."""
    n = obj.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"n={n} exceeds the enumeration guard ({MAX_BRUTE_N})")
    best_v = np.inf
    best_rank = 0
    mult = 0
    total = 1 << n
    for lo in range(0, total, _CHUNK):
        ranks = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        vals = obj.value_batch(spin_matrix(n, ranks))
        chunk_min = vals.min()
        if chunk_min < best_v:
            best_v = float(chunk_min)
            best_rank = int(ranks[int(vals.argmin())])
            mult = int((vals == chunk_min).sum())
        elif chunk_min == best_v:
            mult += int((vals == chunk_min).sum())
    return spin_matrix(n, np.array([best_rank]))[0], best_v, mult


def exact_gibbs(obj: Objective, lam: float) -> ExactDistribution:
    """Gibbs distribution with weights exp(-f(x) / lam), max-shifted."""
    if lam <= 0:
        raise ValueError("lam must be > 0")
    if obj.n > MAX_DIST_N:
        raise ValueError(f"n={obj.n} exceeds the exact-distribution guard")
    return _gibbs_from_values(all_values(obj), obj.n, lam)


def _log_gibbs(f: np.ndarray, lam: float) -> np.ndarray:
    logw = -(f - f.min()) / lam
    return logw - math.log(math.fsum(np.exp(logw)))


def _gibbs_from_values(f: np.ndarray, n: int, lam: float) -> ExactDistribution:
    return ExactDistribution(np.exp(_log_gibbs(f, lam)), n)


def _policy_probs(params: PolicyParams, X: np.ndarray) -> np.ndarray:
    return np.exp(params.log_prob_batch(X))


def exact_loss_and_grad(
    params: PolicyParams,
    obj: Objective,
    lam: float,
    filter_kind: FilterKind = Identity(),
):
    """Exact loss E[f(T(x))] + lam * E[log p(x)] and its theta-gradient.

    The filter is applied with canonical deterministic orders so that
    f(T(.)) is a fixed function of x.
    """
    n = obj.n
    if n > MAX_GRAD_N:
        raise ValueError(f"n={n} exceeds the exact-gradient guard ({MAX_GRAD_N})")
    X = spin_matrix(n)
    fT = deterministic_filter_values(filter_kind, obj, X)
    lp = params.log_prob_batch(X)
    p = np.exp(lp)
    weight = fT + lam * lp
    loss = math.fsum(p * weight)
    G = params.grad_log_prob_batch(X)
    grad = (p * weight) @ G
    return loss, grad


def gap_and_bound(obj: Objective):
    """Optimality gap min_{x not optimal} f(x) - f* and the bound max |f|."""
    if obj.n > MAX_DIST_N:
        raise ValueError(f"n={obj.n} exceeds the exact-distribution guard")
    f = all_values(obj)
    fstar = f.min()
    nonopt = f[f > fstar]
    if nonopt.size == 0:
        raise ValueError("gap undefined for a constant objective")
    return float(nonopt.min() - fstar), float(np.abs(f).max())


def check_prop2(params: PolicyParams, obj: Objective, delta: float) -> bool:
    """Sampling-optimality implication, checked by enumeration.

    If E[f] - f* < (1 - delta) * gap then the policy mass on the optimal
    set must exceed delta.  Returns True when the implication holds
    (vacuously true when the premise fails).
    """
    n = obj.n
    if n > MAX_GRAD_N:
        raise ValueError(f"n={n} exceeds the exact-gradient guard ({MAX_GRAD_N})")
    f = all_values(obj)
    X = spin_matrix(n)
    p = _policy_probs(params, X)
    fstar = f.min()
    mass = math.fsum(p[f == fstar])
    nonopt = f[f > fstar]
    if nonopt.size == 0:
        return mass > delta  # every point optimal: premise trivially holds
    gap = nonopt.min() - fstar
    expectation = math.fsum(p * f)
    premise = (expectation - fstar) < (1.0 - delta) * gap
    return (not premise) or (mass > delta)


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) for rank-indexed probability vectors (p > 0 assumed)."""
    with np.errstate(divide="ignore"):
        return math.fsum(p * (np.log(p) - np.log(q)))


def _kl_against_log(p: np.ndarray, logq: np.ndarray) -> float:
    """KL(p || q) given q in log space; finite even when q underflows."""
    return math.fsum(p * (np.log(p) - logq))


def filter_partition_sizes(obj: Objective, kind: FilterKind) -> np.ndarray:
    """Class sizes of the partition induced by iterating the filter.

    Each point flows to its fixed point under repeated deterministic
    filtering; classes collect points with the same terminal point.
    """
    n = obj.n
    if n > MAX_GRAD_N:
        raise ValueError(f"n={n} exceeds the exact-gradient guard ({MAX_GRAD_N})")
    X = spin_matrix(n)
    terminal = rank_of(X)
    for _ in range(1 << n):
        Xc = spin_matrix(n, terminal)
        Xn = deterministic_filter_points(kind, obj, Xc)
        new = rank_of(Xn)
        if np.array_equal(new, terminal):
            break
        terminal = new
    return np.unique(terminal, return_counts=True)[1]


def filter_kl_report(
    params: PolicyParams, obj: Objective, lam: float, kind: FilterKind
) -> dict:
    """Premise and conclusion of the filtered-Gibbs KL comparison.

    Premise: E_p[f(x) - f(T(x))] >= lam * log(max class size).
    Conclusion: KL(p || Gibbs of f(T(.))) <= KL(p || Gibbs of f).
    """
    n = obj.n
    X = spin_matrix(n)
    p = _policy_probs(params, X)
    f = all_values(obj)
    fT = deterministic_filter_values(kind, obj, X)
    gain = math.fsum(p * (f - fT))
    max_class = int(filter_partition_sizes(obj, kind).max())
    premise = gain >= lam * math.log(max_class)
    kl = _kl_against_log(p, _log_gibbs(f, lam))
    kl_hat = _kl_against_log(p, _log_gibbs(fT, lam))
    return {
        "premise": bool(premise),
        "holds": bool(kl_hat <= kl + 1e-12),
        "kl": kl,
        "kl_filtered": kl_hat,
        "gain": gain,
        "max_class_size": max_class,
    }
