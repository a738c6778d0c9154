"""Quadratic spin objectives: f(s) = s^T J s + b^T s + c.

J is symmetric with zero diagonal (diagonal terms are constant on the
hypercube and belong in c).  MaxCut, spin-converted QUBO, and MIMO
detection all reduce to this form, so they share one incremental-move
engine.  Small J is kept dense; large sparse J is kept in CSR form and
updated through ragged gathers.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .base import MoveState, Objective, _ragged_gather

__all__ = ["QuadraticSpinObjective"]

# Above this dimension a dense J would dominate memory; switch to CSR.
DENSE_MAX_N = 2048


class QuadraticSpinObjective(Objective):
    def __init__(self, J, b=None, c: float = 0.0):
        if sp.issparse(J):
            J = sp.csr_array(J)
            n = J.shape[0]
            if J.diagonal().any():
                raise ValueError("J must have a zero diagonal")
            self._J_sparse = J
            self._J_dense = J.toarray() if n <= DENSE_MAX_N else None
        else:
            J = np.asarray(J, dtype=np.float64)
            n = J.shape[0]
            if np.diagonal(J).any():
                raise ValueError("J must have a zero diagonal")
            self._J_dense = J
            self._J_sparse = None
        if J.shape != (n, n):
            raise ValueError("J must be square")
        self._n = n
        self.b = np.zeros(n) if b is None else np.asarray(b, dtype=np.float64)
        if self.b.shape != (n,):
            raise ValueError("b must be an n-vector")
        self.c = float(c)

    @property
    def n(self) -> int:
        return self._n

    def _field(self, X: np.ndarray) -> np.ndarray:
        """2 * X J + b, row-wise; the local field seen by each coordinate."""
        Xf = X.astype(np.float64, copy=False)
        if self._J_dense is not None:
            H = Xf @ self._J_dense
        else:
            H = (self._J_sparse @ Xf.T).T  # J symmetric
        return 2.0 * H + self.b

    def value(self, x: np.ndarray) -> float:
        x = self._check_x(x)
        return float(self.value_batch(x[None, :])[0])

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        Xf = X.astype(np.float64, copy=False)
        if self._J_dense is not None:
            quad = ((Xf @ self._J_dense) * Xf).sum(axis=1)
        else:
            quad = (((self._J_sparse @ Xf.T).T) * Xf).sum(axis=1)
        return quad + Xf @ self.b + self.c

    def _row_dot(self, i: int, x: np.ndarray) -> float:
        if self._J_dense is not None:
            return float(self._J_dense[i] @ x.astype(np.float64, copy=False))
        J = self._J_sparse
        lo, hi = J.indptr[i], J.indptr[i + 1]
        return float(J.data[lo:hi] @ x[J.indices[lo:hi]].astype(np.float64))

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        x = self._check_x(x)
        i = self._check_index(i)
        g = 2.0 * self._row_dot(i, x) + self.b[i]
        return -2.0 * float(x[i]) * g

    def coupling(self, i: int, j: int) -> float:
        """J[i, j]."""
        if self._J_dense is not None:
            return float(self._J_dense[i, j])
        J = self._J_sparse
        lo, hi = J.indptr[i], J.indptr[i + 1]
        k = np.searchsorted(J.indices[lo:hi], j)
        if k < hi - lo and J.indices[lo + k] == j:
            return float(J.data[lo + k])
        return 0.0

    def pair_delta(self, x: np.ndarray, i: int, j: int) -> float:
        # Joint flip: single deltas double-count the (i, j) interaction,
        # which in truth is unchanged when both spins flip.
        x = self._check_x(x)
        i, j = self._check_index(i), self._check_index(j)
        if i == j:
            return 0.0
        di = self.flip_delta(x, i)
        dj = self.flip_delta(x, j)
        return di + dj + 8.0 * self.coupling(i, j) * float(x[i]) * float(x[j])

    def dense_coupling_matrix(self) -> np.ndarray:
        if self._J_dense is not None:
            return self._J_dense
        return self._J_sparse.toarray()

    def batch_state(self, X: np.ndarray) -> MoveState:
        return _QuadraticMoveState(self, X)


class _QuadraticMoveState(MoveState):
    def __init__(self, obj: QuadraticSpinObjective, X: np.ndarray):
        self.obj = obj
        self.X = np.array(np.atleast_2d(X), dtype=np.int8, copy=True)
        self.H = obj._field(self.X)
        self._vals = obj.value_batch(self.X)
        self._rows = np.arange(self.X.shape[0])

    def values(self) -> np.ndarray:
        return self._vals

    def deltas_at(self, idx: np.ndarray) -> np.ndarray:
        return -2.0 * self.X[self._rows, idx] * self.H[self._rows, idx]

    def all_deltas(self) -> np.ndarray:
        return -2.0 * self.X * self.H

    def flip(self, mask, idx, deltas) -> None:
        rows = np.nonzero(mask)[0]
        if rows.size == 0:
            return
        cols = idx[rows]
        xold = self.X[rows, cols].astype(np.float64)
        obj = self.obj
        if obj._J_dense is not None:
            self.H[rows] -= (4.0 * xold)[:, None] * obj._J_dense[cols]
        else:
            J = obj._J_sparse
            owner, pos = _ragged_gather(J.indptr, cols)
            np.add.at(
                self.H,
                (rows[owner], J.indices[pos]),
                -4.0 * xold[owner] * J.data[pos],
            )
        self.X[rows, cols] = -self.X[rows, cols]
        self._vals[rows] += deltas[rows]
