"""Mean-field Bernoulli sampling policy over spin vectors.

Each coordinate of a spin vector is drawn independently with

    P(x_i = +1) = mu_i = alpha + (1 - 2*alpha) * sigmoid(theta_i),

so mu_i always stays inside the open interval (alpha, 1 - alpha).  The
floor/ceiling keeps every configuration reachable and bounds the
Metropolis acceptance ratio away from zero, which is what lets short
chains keep exploring even late in a run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PolicyParams", "THETA_CLAMP"]

# Logits are clamped before the sigmoid.  mu is already bounded by the
# alpha floor, so the clamp is observationally invisible (< 1e-12 shift)
# while ruling out overflow in exp().
THETA_CLAMP = 30.0


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


@dataclass(frozen=True)
class PolicyParams:
    """Immutable parameters of the product-Bernoulli policy.

    ``theta`` holds one unbounded logit per coordinate; ``alpha`` is the
    probability floor (default 0.2).  Instances are safe to share across
    threads; updates produce a new instance via :meth:`replace_theta`.
    """

    theta: np.ndarray
    alpha: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha < 0.5:
            raise ValueError(f"alpha must lie in [0, 0.5), got {self.alpha}")
        theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        theta = np.clip(theta, -THETA_CLAMP, THETA_CLAMP)
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n(self) -> int:
        return self.theta.size

    @classmethod
    def uniform(cls, n: int, alpha: float = 0.2) -> "PolicyParams":
        """Parameters with theta = 0, i.e. mu_i = 0.5 for every i."""
        return cls(np.zeros(n), alpha)

    def replace_theta(self, theta: np.ndarray) -> "PolicyParams":
        return PolicyParams(theta, self.alpha)

    # -- probabilities -------------------------------------------------

    def _prob_pair(self) -> tuple[np.ndarray, np.ndarray]:
        # P(+1) and P(-1) computed independently from +/-theta; avoids
        # the cancellation of 1 - mu when mu is close to 1.
        scale = 1.0 - 2.0 * self.alpha
        mu = self.alpha + scale * _sigmoid(self.theta)
        co = self.alpha + scale * _sigmoid(-self.theta)
        return mu, co

    def probs(self) -> np.ndarray:
        """Per-coordinate probability of +1, each inside (alpha, 1 - alpha)."""
        return self._prob_pair()[0]

    # -- densities -----------------------------------------------------

    def _check_dim(self, x: np.ndarray, name: str = "x") -> np.ndarray:
        x = np.asarray(x)
        if x.shape[-1] != self.n:
            raise ValueError(
                f"{name} has dimension {x.shape[-1]}, policy has {self.n}"
            )
        return x

    def log_prob(self, x: np.ndarray) -> float:
        """log p(x) for a single spin vector."""
        x = self._check_dim(x)
        if x.ndim != 1:
            raise ValueError("log_prob expects a single spin vector")
        return float(self.log_prob_batch(x[None, :])[0])

    def log_prob_batch(self, X: np.ndarray) -> np.ndarray:
        """log p(x) for each row of an (B, n) array of spin vectors."""
        X = self._check_dim(np.atleast_2d(X), "X")
        mu, co = self._prob_pair()
        lp = np.where(X > 0, np.log(mu), np.log(co))
        return lp.sum(axis=1)

    def grad_log_prob(self, x: np.ndarray) -> np.ndarray:
        """Score function: gradient of log p(x) with respect to theta."""
        x = self._check_dim(x)
        if x.ndim != 1:
            raise ValueError("grad_log_prob expects a single spin vector")
        return self.grad_log_prob_batch(x[None, :])[0]

    def grad_log_prob_batch(self, X: np.ndarray) -> np.ndarray:
        """Score of each row of X; returns an array of the same shape.

        d log p / d theta_i is dmu_i/dtheta_i times 1/mu_i when x_i = +1
        and -1/(1 - mu_i) when x_i = -1, with
        dmu_i/dtheta_i = (1 - 2*alpha) * s_i * (1 - s_i).
        """
        X = self._check_dim(np.atleast_2d(X), "X")
        mu, co = self._prob_pair()
        s = _sigmoid(self.theta)
        dmu = (1.0 - 2.0 * self.alpha) * s * _sigmoid(-self.theta)
        return np.where(X > 0, dmu / mu, -dmu / co)

    # -- sampling --------------------------------------------------------

    def sample_direct(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``count`` i.i.d. spin vectors; (count, n) int8 array.

        Deterministic given the generator state.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        mu = self.probs()
        u = rng.random((count, self.n))
        return np.where(u < mu, 1, -1).astype(np.int8)
