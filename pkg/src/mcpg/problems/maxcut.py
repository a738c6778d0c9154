"""MaxCut and Cheeger-cut objectives on weighted undirected graphs.

MaxCut is minimized as f(x) = -cut(x) where cut(x) is the total weight
of edges whose endpoints get opposite signs.  The ratio Cheeger cut
(RCC) and normal Cheeger cut (NCC) divide the same cut weight by the
sizes of the two parts.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .base import MoveState, Objective
from .quadratic import DENSE_MAX_N, QuadraticSpinObjective

__all__ = ["MaxCutInstance", "CheegerObjective", "cheeger_value"]


class MaxCutInstance(Objective):
    """Weighted graph, minimized as the negated cut weight.

    Edges are canonicalized to u < v and must be unique; parsers and
    generators merge duplicates before construction.
    """

    def __init__(self, n: int, edges):
        edges = list(edges)
        self._n = int(n)
        u = np.array([e[0] for e in edges], dtype=np.int64)
        v = np.array([e[1] for e in edges], dtype=np.int64)
        w = np.array([e[2] for e in edges], dtype=np.float64)
        if u.size:
            if u.min(initial=0) < 0 or max(u.max(initial=0), v.max(initial=0)) >= n:
                raise ValueError("edge endpoint out of range")
        if np.any(u == v):
            raise ValueError("self-loops are not allowed")
        swap = u > v
        u[swap], v[swap] = v[swap], u[swap]
        order = np.lexsort((v, u))
        self.edge_u, self.edge_v, self.edge_w = u[order], v[order], w[order]
        if self.edge_u.size:
            dup = (np.diff(self.edge_u) == 0) & (np.diff(self.edge_v) == 0)
            if dup.any():
                raise ValueError("duplicate edges; merge weights before construction")
        self.total_weight = float(self.edge_w.sum())
        # Symmetric weighted adjacency, used for local fields and Cheeger.
        W = sp.coo_array(
            (
                np.concatenate([self.edge_w, self.edge_w]),
                (
                    np.concatenate([self.edge_u, self.edge_v]),
                    np.concatenate([self.edge_v, self.edge_u]),
                ),
            ),
            shape=(self._n, self._n),
        )
        self.adjacency = sp.csr_array(W)
        J = self.adjacency * 0.25
        if self._n <= DENSE_MAX_N:
            J = J.toarray()
        self._quad = QuadraticSpinObjective(J, c=-self.total_weight / 2.0)

    @property
    def n(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return self.edge_u.size

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def cut_weight(self, x: np.ndarray) -> float:
        """Total weight of crossing edges (the quantity reported for MaxCut)."""
        x = self._check_x(x)
        return float(self.cut_weight_batch(x[None, :])[0])

    def cut_weight_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        prod = X[:, self.edge_u].astype(np.int32) * X[:, self.edge_v]
        return 0.5 * ((1 - prod) @ self.edge_w)

    def value(self, x: np.ndarray) -> float:
        return -self.cut_weight(x)

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        return -self.cut_weight_batch(X)

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        return self._quad.flip_delta(x, i)

    def pair_delta(self, x: np.ndarray, i: int, j: int) -> float:
        return self._quad.pair_delta(x, i, j)

    def batch_state(self, X: np.ndarray) -> MoveState:
        return self._quad.batch_state(X)


def _cheeger_ratio(cut, n_plus, n_minus, kind: str, sentinel: float):
    """Vectorized RCC/NCC with a large finite sentinel for empty sides."""
    cut = np.asarray(cut, dtype=np.float64)
    n_plus = np.asarray(n_plus, dtype=np.float64)
    n_minus = np.asarray(n_minus, dtype=np.float64)
    empty = (n_plus == 0) | (n_minus == 0)
    safe_p = np.where(n_plus == 0, 1.0, n_plus)
    safe_m = np.where(n_minus == 0, 1.0, n_minus)
    if kind == "rcc":
        ratio = cut / np.minimum(safe_p, safe_m)
    elif kind == "ncc":
        ratio = cut / safe_p + cut / safe_m
    else:
        raise ValueError(f"unknown Cheeger kind {kind!r}")
    return np.where(empty, sentinel, ratio)


class CheegerObjective(Objective):
    """Ratio (RCC) or normal (NCC) Cheeger cut of a graph partition.

    A partition with an empty side gets a large finite sentinel value so
    sampling ratios and advantages stay numeric.
    """

    def __init__(self, graph: MaxCutInstance, kind: str = "rcc"):
        kind = kind.lower()
        if kind not in ("rcc", "ncc"):
            raise ValueError("kind must be 'rcc' or 'ncc'")
        self.graph = graph
        self.kind = kind
        self.sentinel = 1e6 * (1.0 + graph.total_weight)

    @property
    def n(self) -> int:
        return self.graph.n

    def value(self, x: np.ndarray) -> float:
        x = self._check_x(x)
        return float(self.value_batch(x[None, :])[0])

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        cut = self.graph.cut_weight_batch(X)
        n_plus = (X > 0).sum(axis=1)
        return _cheeger_ratio(cut, n_plus, self.n - n_plus, self.kind, self.sentinel)

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        x = self._check_x(x)
        i = self._check_index(i)
        cut = self.graph.cut_weight(x)
        n_plus = int((x > 0).sum())
        A = self.graph.adjacency
        lo, hi = A.indptr[i], A.indptr[i + 1]
        h_i = float(A.data[lo:hi] @ x[A.indices[lo:hi]].astype(np.float64))
        new_cut = cut + float(x[i]) * h_i
        new_plus = n_plus - int(x[i])
        old = _cheeger_ratio(cut, n_plus, self.n - n_plus, self.kind, self.sentinel)
        new = _cheeger_ratio(new_cut, new_plus, self.n - new_plus, self.kind, self.sentinel)
        return float(new - old)

    def batch_state(self, X: np.ndarray) -> MoveState:
        return _CheegerMoveState(self, X)


class _CheegerMoveState(MoveState):
    """Cut is updated incrementally; the ratio is recomputed from counters."""

    def __init__(self, obj: CheegerObjective, X: np.ndarray):
        self.obj = obj
        g = obj.graph
        self.X = np.array(np.atleast_2d(X), dtype=np.int8, copy=True)
        Xf = self.X.astype(np.float64)
        A = g.adjacency
        self._A_dense = None if g.n > DENSE_MAX_N else A.toarray()
        self.H = (A @ Xf.T).T if self._A_dense is None else Xf @ self._A_dense
        self.cut = g.cut_weight_batch(self.X)
        self.n_plus = (self.X > 0).sum(axis=1)
        self._rows = np.arange(self.X.shape[0])

    def _ratio(self, cut, n_plus):
        o = self.obj
        return _cheeger_ratio(cut, n_plus, o.n - n_plus, o.kind, o.sentinel)

    def values(self) -> np.ndarray:
        return self._ratio(self.cut, self.n_plus)

    def deltas_at(self, idx: np.ndarray) -> np.ndarray:
        xg = self.X[self._rows, idx]
        hg = self.H[self._rows, idx]
        new_cut = self.cut + xg * hg
        new_plus = self.n_plus - xg
        return self._ratio(new_cut, new_plus) - self.values()

    def all_deltas(self) -> np.ndarray:
        new_cut = self.cut[:, None] + self.X * self.H
        new_plus = self.n_plus[:, None] - self.X
        o = self.obj
        new = _cheeger_ratio(new_cut, new_plus, o.n - new_plus, o.kind, o.sentinel)
        return new - self.values()[:, None]

    def flip(self, mask, idx, deltas) -> None:
        rows = np.nonzero(mask)[0]
        if rows.size == 0:
            return
        cols = idx[rows]
        xold = self.X[rows, cols]
        self.cut[rows] += xold * self.H[rows, cols]
        self.n_plus[rows] -= xold
        if self._A_dense is None:
            from .base import _ragged_gather

            A = self.obj.graph.adjacency
            owner, pos = _ragged_gather(A.indptr, cols)
            np.add.at(
                self.H,
                (rows[owner], A.indices[pos]),
                -2.0 * xold[owner].astype(np.float64) * A.data[pos],
            )
        else:
            self.H[rows] -= (2.0 * xold.astype(np.float64))[:, None] * self._A_dense[cols]
        self.X[rows, cols] = -xold


def cheeger_value(instance: MaxCutInstance, x: np.ndarray, kind: str) -> float:
    """RCC or NCC value of the partition encoded by x."""
    return CheegerObjective(instance, kind).value(x)
