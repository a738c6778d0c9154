"""Objective interface shared by every problem family.

All problems are expressed in a single minimization convention over spin
vectors x in {-1,+1}^n; maximization problems are negated at
construction time and converted back only in reports.
"""

from __future__ import annotations

import abc

import numpy as np

__all__ = ["SpinVector", "as_spins", "flip", "Objective", "MoveState"]

SpinVector = np.ndarray


def as_spins(values, n: int | None = None) -> np.ndarray:
    """Validate and convert to an int8 spin vector with entries in {-1,+1}."""
    x = np.asarray(values)
    if x.ndim != 1:
        raise ValueError(f"spin vector must be 1-d, got shape {x.shape}")
    if n is not None and x.size != n:
        raise ValueError(f"dimension mismatch: expected {n}, got {x.size}")
    out = x.astype(np.int8)
    if not np.all(np.abs(out) == 1) or not np.array_equal(out, x):
        raise ValueError("spin entries must be exactly -1 or +1")
    return out


def flip(x: np.ndarray, i: int) -> np.ndarray:
    """Copy of x with coordinate i negated."""
    y = np.array(x, copy=True)
    y[i] = -y[i]
    return y


def _ragged_gather(indptr: np.ndarray, keys: np.ndarray):
    """Concatenate CSR rows ``keys``.

    Returns (owner, pos): ``pos`` indexes the CSR data/indices arrays and
    ``owner[k]`` says which entry of ``keys`` the k-th position belongs to.
    """
    starts = indptr[keys]
    counts = indptr[keys + 1] - starts
    total = int(counts.sum())
    owner = np.repeat(np.arange(keys.size), counts)
    base = np.repeat(np.cumsum(counts) - counts, counts)
    pos = np.repeat(starts, counts) + (np.arange(total) - base)
    return owner, pos


class Objective(abc.ABC):
    """A minimization objective over spin vectors.

    Subclasses must provide ``n`` and ``value``; the incremental hooks
    (``flip_delta``, ``batch_state``) have generic but slow defaults and
    are overridden wherever structure allows O(deg) updates.
    Instances are immutable after construction and safe to share.
    """

    @property
    @abc.abstractmethod
    def n(self) -> int:
        ...

    @abc.abstractmethod
    def value(self, x: np.ndarray) -> float:
        ...

    def _check_x(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.ndim != 1 or x.size != self.n:
            raise ValueError(f"dimension mismatch: expected {self.n}-vector")
        return x

    def _check_index(self, i: int) -> int:
        i = int(i)
        if not 0 <= i < self.n:
            raise IndexError(f"flip index {i} out of range for n={self.n}")
        return i

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        """value(flip(x, i)) - value(x)."""
        x = self._check_x(x)
        i = self._check_index(i)
        return self.value(flip(x, i)) - self.value(x)

    def pair_delta(self, x: np.ndarray, i: int, j: int) -> float:
        """Change in value when coordinates i and j are flipped jointly."""
        x = self._check_x(x)
        i, j = self._check_index(i), self._check_index(j)
        d1 = self.flip_delta(x, i)
        return d1 + self.flip_delta(flip(x, i), j)

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        """Objective value of each row of an (B, n) array."""
        X = np.atleast_2d(X)
        return np.array([self.value(row) for row in X], dtype=np.float64)

    def batch_state(self, X: np.ndarray) -> "MoveState":
        return _GenericMoveState(self, X)


class MoveState:
    """Mutable scratch for applying sequential flips to a batch of states.

    One state is private to a single local-search invocation; the parent
    Objective is only read.  ``X`` is an owned (B, n) int8 copy.
    """

    X: np.ndarray

    def values(self) -> np.ndarray:
        raise NotImplementedError

    def deltas_at(self, idx: np.ndarray) -> np.ndarray:
        """Flip delta of coordinate idx[b] for each row b."""
        raise NotImplementedError

    def all_deltas(self) -> np.ndarray:
        """(B, n) array of single-flip deltas."""
        raise NotImplementedError

    def flip(self, mask: np.ndarray, idx: np.ndarray, deltas: np.ndarray) -> None:
        """Apply the flips (b, idx[b]) where mask[b], using their deltas."""
        raise NotImplementedError


class _GenericMoveState(MoveState):
    """Fallback that re-evaluates flip_delta row by row (small n only)."""

    def __init__(self, obj: Objective, X: np.ndarray):
        self.obj = obj
        self.X = np.array(np.atleast_2d(X), dtype=np.int8, copy=True)
        self._vals = obj.value_batch(self.X)

    def values(self) -> np.ndarray:
        return self._vals

    def deltas_at(self, idx: np.ndarray) -> np.ndarray:
        return np.array(
            [self.obj.flip_delta(row, int(i)) for row, i in zip(self.X, idx)]
        )

    def all_deltas(self) -> np.ndarray:
        return np.array(
            [[self.obj.flip_delta(row, i) for i in range(self.obj.n)] for row in self.X]
        )

    def flip(self, mask, idx, deltas) -> None:
        rows = np.nonzero(mask)[0]
        self.X[rows, idx[rows]] *= -1
        self._vals[rows] += deltas[rows]
