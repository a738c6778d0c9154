"""(Partial) MaxSAT as weighted clause satisfaction over spins.

A literal +v is satisfied when x_v = +1 and -v when x_v = -1 (variables
are 1-based in clause literals, following DIMACS).  Soft clauses carry
their given weights; hard clauses are folded into the objective with the
dominating weight (number of soft clauses) + 1, so any assignment
satisfying all hard clauses beats every assignment that violates one.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .base import MoveState, Objective, _ragged_gather

__all__ = ["MaxSatInstance"]


class MaxSatInstance(Objective):
    """Clause list with weights and hard flags, minimized as -(weighted sat).

    ``clauses`` is a sequence of (literals, weight) pairs; literals are
    nonzero signed ints with magnitude <= n and no repeated variable.
    """

    def __init__(self, n: int, clauses, hard_flags=None):
        self._n = int(n)
        lits_list = []
        weights = []
        for lits, w in clauses:
            lits = tuple(int(l) for l in lits)
            if not lits:
                raise ValueError("zero-variable clause")
            if any(l == 0 or abs(l) > n for l in lits):
                raise ValueError(f"literal out of range in clause {lits}")
            if len({abs(l) for l in lits}) != len(lits):
                raise ValueError(f"duplicate variable in clause {lits}")
            if w <= 0:
                raise ValueError("clause weights must be positive")
            lits_list.append(lits)
            weights.append(float(w))
        m = len(lits_list)
        if hard_flags is None:
            hard_flags = [False] * m
        hard_flags = np.asarray(hard_flags, dtype=bool)
        if hard_flags.shape != (m,):
            raise ValueError("hard_flags length must match clause count")

        self.clause_literals = lits_list
        self.weights = np.asarray(weights, dtype=np.float64)
        self.hard_flags = hard_flags
        self.soft_count = int((~hard_flags).sum())
        self.hard_weight = float(self.soft_count + 1)
        self.effective_weights = np.where(hard_flags, self.hard_weight, self.weights)

        # Flattened literal arrays and a per-variable occurrence CSR.
        sizes = np.array([len(l) for l in lits_list], dtype=np.int64)
        flat = np.concatenate([np.array(l, dtype=np.int64) for l in lits_list]) if m else np.zeros(0, np.int64)
        self.cl_indptr = np.concatenate([[0], np.cumsum(sizes)])
        self.cl_var = np.abs(flat) - 1
        self.cl_sign = np.sign(flat).astype(np.int8)
        self.cl_id = np.repeat(np.arange(m), sizes)
        order = np.argsort(self.cl_var, kind="stable")
        self.occ_indptr = np.concatenate(
            [[0], np.cumsum(np.bincount(self.cl_var, minlength=self._n))]
        ).astype(np.int64)
        self.occ_clause = self.cl_id[order]
        self.occ_sign = self.cl_sign[order]
        # 0/1 indicator matrices used to reduce per-literal quantities to
        # per-clause counts and per-variable delta sums.
        L = self.cl_var.size
        ones = np.ones(L)
        self._lit_to_clause = sp.csr_array(
            (ones, (np.arange(L), self.cl_id)), shape=(L, max(m, 1))
        )
        self._lit_to_var = sp.csr_array(
            (ones, (np.arange(L), self.cl_var)), shape=(L, self._n)
        )

    @property
    def n(self) -> int:
        return self._n

    @property
    def num_clauses(self) -> int:
        return len(self.clause_literals)

    def _sat_counts(self, X: np.ndarray) -> np.ndarray:
        """(B, num_clauses) count of satisfied literals per clause."""
        X = np.atleast_2d(X)
        true_lit = (X[:, self.cl_var] * self.cl_sign) > 0
        counts = (self._lit_to_clause.T @ true_lit.astype(np.float64).T).T
        return counts[:, : self.num_clauses].astype(np.int16)

    def satisfied_mask(self, x: np.ndarray) -> np.ndarray:
        x = self._check_x(x)
        return self._sat_counts(x[None, :])[0] > 0

    def satisfied_soft(self, x: np.ndarray) -> float:
        """Total weight of satisfied soft clauses (the reported objective)."""
        sat = self.satisfied_mask(x)
        return float(self.weights[sat & ~self.hard_flags].sum())

    def hard_satisfied(self, x: np.ndarray) -> bool:
        sat = self.satisfied_mask(x)
        return bool(sat[self.hard_flags].all())

    def value(self, x: np.ndarray) -> float:
        x = self._check_x(x)
        return float(self.value_batch(x[None, :])[0])

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        counts = self._sat_counts(X)
        return -((counts > 0) @ self.effective_weights)

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        x = self._check_x(x)
        i = self._check_index(i)
        lo, hi = self.occ_indptr[i], self.occ_indptr[i + 1]
        delta = 0.0
        for c, s in zip(self.occ_clause[lo:hi], self.occ_sign[lo:hi]):
            clo, chi = self.cl_indptr[c], self.cl_indptr[c + 1]
            cnt = int(
                ((x[self.cl_var[clo:chi]] * self.cl_sign[clo:chi]) > 0).sum()
            )
            w = self.effective_weights[c]
            if s * x[i] > 0:  # literal currently true; flip may break the clause
                if cnt == 1:
                    delta += w
            else:  # literal currently false; flip may newly satisfy it
                if cnt == 0:
                    delta -= w
        return float(delta)

    def batch_state(self, X: np.ndarray) -> MoveState:
        return _MaxSatMoveState(self, X)


class _MaxSatMoveState(MoveState):
    """Tracks per-clause satisfied-literal counters for O(occurrence) flips."""

    def __init__(self, obj: MaxSatInstance, X: np.ndarray):
        self.obj = obj
        self.X = np.array(np.atleast_2d(X), dtype=np.int8, copy=True)
        self.counts = obj._sat_counts(self.X)
        self._vals = -((self.counts > 0) @ obj.effective_weights)
        self._rows = np.arange(self.X.shape[0])

    def values(self) -> np.ndarray:
        return self._vals

    def _gather(self, idx: np.ndarray):
        obj = self.obj
        owner, pos = _ragged_gather(obj.occ_indptr, idx)
        rows = self._rows[owner] if owner.size else owner
        clauses = obj.occ_clause[pos]
        signs = obj.occ_sign[pos]
        cur = self.X[rows, idx[owner]]
        return owner, rows, clauses, signs, cur

    def deltas_at(self, idx: np.ndarray) -> np.ndarray:
        obj = self.obj
        owner, rows, clauses, signs, cur = self._gather(idx)
        cnt = self.counts[rows, clauses]
        w = obj.effective_weights[clauses]
        true_now = signs * cur > 0
        contrib = np.where(
            true_now & (cnt == 1), w, np.where(~true_now & (cnt == 0), -w, 0.0)
        )
        return np.bincount(owner, weights=contrib, minlength=self.X.shape[0])

    def all_deltas(self) -> np.ndarray:
        obj = self.obj
        B = self.X.shape[0]
        true_lit = (self.X[:, obj.cl_var] * obj.cl_sign) > 0
        cnt = self.counts[:, obj.cl_id]
        w = obj.effective_weights[obj.cl_id]
        contrib = np.where(
            true_lit & (cnt == 1), w, np.where(~true_lit & (cnt == 0), -w, 0.0)
        )
        return (obj._lit_to_var.T @ contrib.T).T.reshape(B, obj.n)

    def flip(self, mask, idx, deltas) -> None:
        sel = np.nonzero(mask)[0]
        if sel.size == 0:
            return
        owner, rows, clauses, signs, cur = self._gather(idx)
        keep = mask[owner]
        rows, clauses, signs, cur = rows[keep], clauses[keep], signs[keep], cur[keep]
        # A true literal loses one satisfied count, a false one gains it.
        np.add.at(self.counts, (rows, clauses), np.where(signs * cur > 0, -1, 1).astype(np.int16))
        self.X[sel, idx[sel]] *= -1
        self._vals[sel] += deltas[sel]
