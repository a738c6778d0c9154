"""Exact L1 penalty for constrained binary problems.

Equality constraints c_i(x) = 0 are folded into the objective as
f(x) + sigma * sum_i |c_i(x)|.  Because the feasible region is a finite
set, the penalty is exact: above a finite threshold on sigma, the
unconstrained minimizers coincide with the constrained ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import Objective

__all__ = ["PenalizedObjective", "ParityConstraint", "penalty_value"]


@dataclass(frozen=True)
class ParityConstraint:
    """c(x) = prod of x over ``indices`` minus ``target`` (+1 or -1).

    Violations contribute |c(x)| = 2; satisfied assignments give 0.
    """

    indices: tuple
    target: int = 1

    def __call__(self, x: np.ndarray) -> float:
        prod = int(np.prod(x[list(self.indices)]))
        return float(prod - self.target)


class PenalizedObjective(Objective):
    def __init__(self, base: Objective, constraints, sigma: float):
        if sigma < 0:
            raise ValueError("sigma must be nonnegative")
        self.base = base
        self.constraints = list(constraints)
        self.sigma = float(sigma)

    @property
    def n(self) -> int:
        return self.base.n

    def violation(self, x: np.ndarray) -> float:
        """L1 norm of the constraint vector."""
        x = self._check_x(x)
        return float(sum(abs(c(x)) for c in self.constraints))

    def value(self, x: np.ndarray) -> float:
        x = self._check_x(x)
        return self.base.value(x) + self.sigma * self.violation(x)


def penalty_value(p: PenalizedObjective, x: np.ndarray) -> float:
    return p.value(x)
