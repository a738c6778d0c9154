"""Filter functions: map a sample to a no-worse nearby point.

A filter T satisfies value(T(x)) <= value(x) and fixes global minima, so
replacing f by f(T(.)) preserves the optimum while flattening the
landscape the sampler sees.  Available kinds:

* ``Identity``       -- T(x) = x.
* ``KFlip(k)``       -- best point within Hamming distance k (k in {1, 2}).
* ``LocalSearch``    -- one greedy sweep over a random index permutation,
                        accepting strictly improving single flips.
* ``EdgeLocalSearch``-- MaxCut only: sweep over edges, flipping both
                        endpoints together when strictly improving.

Ties are never taken: a flip is accepted only on strict improvement, so
a point that cannot strictly improve is returned unchanged.  Among equal
strict improvements KFlip picks the lexicographically smallest flip set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems.base import Objective, as_spins
from .problems.maxcut import MaxCutInstance
from .problems.quadratic import QuadraticSpinObjective

__all__ = [
    "FilterKind",
    "Identity",
    "KFlip",
    "LocalSearch",
    "EdgeLocalSearch",
    "filter_from_name",
    "apply_filter",
    "apply_filter_batch",
    "local_search_pass",
    "edge_local_search_pass",
]

KFLIP2_MAX_N = 5000
_CONVERGE_SWEEP_CAP = 100


class FilterKind:
    pass


@dataclass(frozen=True)
class Identity(FilterKind):
    pass


@dataclass(frozen=True)
class KFlip(FilterKind):
    k: int = 1

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError("KFlip supports k in {1, 2} only")


@dataclass(frozen=True)
class LocalSearch(FilterKind):
    # One sweep by default; set until_convergence to repeat sweeps while
    # any flip was accepted (capped).
    until_convergence: bool = False


@dataclass(frozen=True)
class EdgeLocalSearch(FilterKind):
    until_convergence: bool = False


_NAMES = {
    "none": Identity(),
    "identity": Identity(),
    "kflip1": KFlip(1),
    "kflip2": KFlip(2),
    "ls": LocalSearch(),
    "edge-ls": EdgeLocalSearch(),
}


def filter_from_name(name: str) -> FilterKind:
    try:
        return _NAMES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown filter {name!r}; choose from {sorted(_NAMES)}")


# -- single-point passes ------------------------------------------------


def _check_permutation(perm, size: int) -> np.ndarray:
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (size,) or not np.array_equal(np.sort(perm), np.arange(size)):
        raise ValueError(f"not a permutation of 0..{size - 1}")
    return perm


def local_search_pass(obj: Objective, x, permutation) -> np.ndarray:
    """One greedy sweep over the given index order; deterministic."""
    x = as_spins(x, obj.n).copy()
    perm = _check_permutation(permutation, obj.n)
    for i in perm:
        if obj.flip_delta(x, int(i)) < 0.0:
            x[i] = -x[i]
    return x


def edge_local_search_pass(inst, x, edge_permutation) -> np.ndarray:
    """One sweep over edges, jointly flipping endpoints on strict improvement."""
    graph = _require_graph(inst)
    x = as_spins(x, graph.n).copy()
    perm = _check_permutation(edge_permutation, graph.num_edges)
    for e in perm:
        u, v = int(graph.edge_u[e]), int(graph.edge_v[e])
        if inst.pair_delta(x, u, v) < 0.0:
            x[u] = -x[u]
            x[v] = -x[v]
    return x


def _require_graph(obj) -> MaxCutInstance:
    if isinstance(obj, MaxCutInstance):
        return obj
    raise TypeError("edge local search requires a MaxCut (graph) objective")


# -- batched application -------------------------------------------------


def _run_local_search(obj, X, perms, until_convergence: bool):
    st = obj.batch_state(X)
    B, n = st.X.shape
    sweeps = _CONVERGE_SWEEP_CAP if until_convergence else 1
    for _ in range(sweeps):
        improved = False
        for t in range(n):
            idx = perms[:, t]
            d = st.deltas_at(idx)
            m = d < 0.0
            if m.any():
                st.flip(m, idx, d)
                improved = True
        if not improved:
            break
    return st.X


def _run_edge_local_search(obj, graph, X, perms, until_convergence: bool):
    st = obj.batch_state(X)
    B = st.X.shape[0]
    rows = np.arange(B)
    m_edges = graph.num_edges
    sweeps = _CONVERGE_SWEEP_CAP if until_convergence else 1
    for _ in range(sweeps):
        improved = False
        for t in range(m_edges):
            e = perms[:, t]
            u, v = graph.edge_u[e], graph.edge_v[e]
            du = st.deltas_at(u)
            dv = st.deltas_at(v)
            # Joint flip leaves the (u, v) interaction unchanged; the single
            # deltas double-count it, hence the 2 * w * x_u * x_v correction.
            corr = 2.0 * graph.edge_w[e] * st.X[rows, u] * st.X[rows, v]
            joint = du + dv + corr
            m = joint < 0.0
            if m.any():
                st.flip(m, u, du)
                dv2 = st.deltas_at(v)
                st.flip(m, v, dv2)
                improved = True
        if not improved:
            break
    return st.X


def _run_kflip1(obj, X):
    st = obj.batch_state(X)
    D = st.all_deltas()
    best = D.argmin(axis=1)  # first minimum: lowest flipped index on ties
    bd = D[np.arange(D.shape[0]), best]
    st.flip(bd < 0.0, best, bd)
    return st.X


def _kflip2_single(obj, x):
    n = obj.n
    if n > KFLIP2_MAX_N:
        raise ValueError(f"KFlip(2) is only offered for n <= {KFLIP2_MAX_N}")
    st = obj.batch_state(x[None, :])
    d1 = st.all_deltas()[0]
    pair_rows = None
    if isinstance(obj, QuadraticSpinObjective) or hasattr(obj, "_quad"):
        quad = obj if isinstance(obj, QuadraticSpinObjective) else obj._quad
        J = quad.dense_coupling_matrix()
        xf = x.astype(np.float64)
        pair_rows = d1[:, None] + d1[None, :] + 8.0 * J * np.outer(xf, xf)
    best_d = 0.0
    best_set = None
    # Scan flip sets in lexicographic order: (i,) precedes every (i, j).
    for i in range(n):
        if d1[i] < best_d:
            best_d, best_set = d1[i], (i,)
        if i + 1 < n:
            if pair_rows is not None:
                row = pair_rows[i, i + 1 :]
            else:
                row = np.array([obj.pair_delta(x, i, j) for j in range(i + 1, n)])
            j = int(row.argmin())
            if row[j] < best_d:
                best_d, best_set = float(row[j]), (i, i + 1 + j)
    if best_set is None:
        return x
    y = x.copy()
    for i in best_set:
        y[i] = -y[i]
    return y


def apply_filter_batch(kind: FilterKind, obj: Objective, X, rng=None, perms=None):
    """Filter each row of X; returns (filtered X, their objective values).

    A fresh random order is drawn per row unless ``perms`` is given (the
    deterministic mode used by exact enumeration).  Filtered values are
    re-evaluated from scratch, and any row that floating-point drift left
    worse than its input is reverted, so monotonicity holds exactly.
    """
    X = np.array(np.atleast_2d(X), dtype=np.int8, copy=True)
    B, n = X.shape
    if isinstance(kind, Identity):
        return X, obj.value_batch(X)

    if isinstance(kind, (LocalSearch, EdgeLocalSearch)) and rng is None and perms is None:
        raise ValueError("local-search filters need an rng (or explicit perms)")

    if isinstance(kind, KFlip):
        if kind.k == 1:
            out = _run_kflip1(obj, X)
        else:
            out = np.stack([_kflip2_single(obj, row) for row in X])
    elif isinstance(kind, LocalSearch):
        if perms is None:
            perms = np.argsort(rng.random((B, n)), axis=1)
        out = _run_local_search(obj, X, perms, kind.until_convergence)
    elif isinstance(kind, EdgeLocalSearch):
        graph = _require_graph(obj)
        m = graph.num_edges
        if perms is None:
            perms = np.argsort(rng.random((B, m)), axis=1)
        out = _run_edge_local_search(obj, graph, X, perms, kind.until_convergence)
    else:
        raise TypeError(f"unsupported filter kind {kind!r}")

    vals = obj.value_batch(out)
    v0 = obj.value_batch(X)
    bad = vals > v0
    if bad.any():
        out[bad] = X[bad]
        vals[bad] = v0[bad]
    return out, vals


def apply_filter(kind: FilterKind, obj: Objective, x, rng=None) -> np.ndarray:
    """Filter a single spin vector."""
    x = as_spins(x, obj.n)
    out, _ = apply_filter_batch(kind, obj, x[None, :], rng)
    return out[0]


def deterministic_filter_values(kind: FilterKind, obj: Objective, X) -> np.ndarray:
    """Objective values after filtering with canonical (identity) orders.

    Used by exact enumeration, where f(T(x)) must be a fixed function.
    """
    X = np.atleast_2d(X)
    B = X.shape[0]
    if isinstance(kind, LocalSearch):
        perms = np.tile(np.arange(obj.n), (B, 1))
    elif isinstance(kind, EdgeLocalSearch):
        perms = np.tile(np.arange(_require_graph(obj).num_edges), (B, 1))
    else:
        perms = None
    return apply_filter_batch(kind, obj, X, perms=perms)[1]


def deterministic_filter_points(kind: FilterKind, obj: Objective, X) -> np.ndarray:
    """Filtered points under the same canonical orders."""
    X = np.atleast_2d(X)
    B = X.shape[0]
    if isinstance(kind, LocalSearch):
        perms = np.tile(np.arange(obj.n), (B, 1))
    elif isinstance(kind, EdgeLocalSearch):
        perms = np.tile(np.arange(_require_graph(obj).num_edges), (B, 1))
    else:
        perms = None
    return apply_filter_batch(kind, obj, X, perms=perms)[0]
