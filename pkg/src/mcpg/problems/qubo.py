"""QUBO instances: maximize x^T Q x over x in {0,1}^n.

Q is symmetric and stored as its upper triangle (including the
diagonal).  Solving happens in spin space after the substitution
x = (s + 1) / 2, which introduces a linear term; reports convert the
optimal value back to the 0/1 maximization convention.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .base import MoveState, Objective
from .quadratic import DENSE_MAX_N, QuadraticSpinObjective

__all__ = ["QuboInstance", "qubo_to_spin"]


class QuboInstance(Objective):
    """Upper-triangle COO storage: rows, cols (rows <= cols), vals."""

    def __init__(self, n: int, rows, cols, vals):
        self._n = int(n)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape):
            raise ValueError("rows, cols, vals must have equal length")
        if rows.size and (rows.min() < 0 or cols.max() >= n):
            raise ValueError("index out of range")
        swap = rows > cols
        rows, cols = np.where(swap, cols, rows), np.where(swap, rows, cols)
        order = np.lexsort((cols, rows))
        self.rows, self.cols, self.vals = rows[order], cols[order], vals[order]
        if self.rows.size > 1:
            dup = (np.diff(self.rows) == 0) & (np.diff(self.cols) == 0)
            if dup.any():
                raise ValueError("duplicate entries in Q")
        quad, lin, const = qubo_to_spin(self)
        # Spin-space minimization objective: negate the maximization form.
        J = sp.coo_array(
            (
                np.concatenate([-0.5 * quad[2], -0.5 * quad[2]]),
                (
                    np.concatenate([quad[0], quad[1]]),
                    np.concatenate([quad[1], quad[0]]),
                ),
            ),
            shape=(self._n, self._n),
        ).tocsr()
        J = sp.csr_array(J)
        if self._n <= DENSE_MAX_N:
            J = J.toarray()
        self._quad = QuadraticSpinObjective(J, b=-lin, c=-const)

    @property
    def n(self) -> int:
        return self._n

    @property
    def nnz(self) -> int:
        return self.vals.size

    def qubo_value(self, x01: np.ndarray) -> float:
        """x^T Q x for a 0/1 vector, from the stored upper triangle."""
        x01 = np.asarray(x01, dtype=np.float64)
        prod = x01[self.rows] * x01[self.cols]
        off = self.rows != self.cols
        return float((prod * self.vals * np.where(off, 2.0, 1.0)).sum())

    def max_objective(self, x: np.ndarray) -> float:
        """x^T Q x of the 0/1 point encoded by the spin vector x."""
        x = self._check_x(x)
        return self.qubo_value((x.astype(np.int64) + 1) // 2)

    def value(self, x: np.ndarray) -> float:
        x = self._check_x(x)
        return self._quad.value(x)

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        return self._quad.value_batch(X)

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        return self._quad.flip_delta(x, i)

    def pair_delta(self, x: np.ndarray, i: int, j: int) -> float:
        return self._quad.pair_delta(x, i, j)

    def batch_state(self, X: np.ndarray) -> MoveState:
        return self._quad.batch_state(X)


def qubo_to_spin(q: QuboInstance):
    """Spin-space expansion of x^T Q x under x = (s + 1) / 2.

    Returns ``(quadratic, linear, constant)`` where ``quadratic`` is an
    upper-triangle COO triple (rows, cols, vals) with rows < cols, each
    value multiplying s_i * s_j exactly once:

        x^T Q x = sum_{i<j} vals * s_i s_j + linear . s + constant.
    """
    off = q.rows != q.cols
    pair_rows, pair_cols = q.rows[off], q.cols[off]
    pair_vals = 0.5 * q.vals[off]

    # Linear term: half the full-matrix row sums (diagonal included once).
    lin = np.zeros(q.n)
    np.add.at(lin, q.rows, 0.5 * q.vals)
    np.add.at(lin, q.cols[off], 0.5 * q.vals[off])

    const = float(0.5 * q.vals[~off].sum() + 0.5 * q.vals[off].sum())
    return (pair_rows, pair_cols, pair_vals), lin, const
