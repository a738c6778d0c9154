"""Maximum-likelihood MIMO detection as a binary least-squares problem.

A complex linear model y_c = H_c x_c + noise with QPSK symbols
(real and imaginary parts in {-1,+1}) is reduced to the real problem

    minimize ||H x - y||^2  over  x in {-1,+1}^{2N},

where H is the 2M x 2N block matrix [[Re, -Im], [Im, Re]] and
x stacks [Re(x_c); Im(x_c)].
"""

from __future__ import annotations

import numpy as np

from .base import MoveState, Objective
from .quadratic import QuadraticSpinObjective

__all__ = ["MimoInstance", "mimo_build"]


class MimoInstance(Objective):
    def __init__(self, H: np.ndarray, y: np.ndarray, sigma: float,
                 ground_truth: np.ndarray | None = None):
        H = np.asarray(H, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if H.ndim != 2 or y.shape != (H.shape[0],):
            raise ValueError("H must be (2M, 2N) with y of length 2M")
        self.H = H
        self.y = y
        self.sigma = float(sigma)
        self.ground_truth = (
            None if ground_truth is None
            else np.asarray(ground_truth, dtype=np.int8)
        )
        if self.ground_truth is not None and self.ground_truth.shape != (H.shape[1],):
            raise ValueError("ground_truth has the wrong length")
        # ||Hx - y||^2 = x^T (H^T H) x - 2 y^T H x + y^T y; the diagonal of
        # H^T H is constant on the hypercube and moves into c.
        G = H.T @ H
        diag = np.diagonal(G).copy()
        J = G - np.diag(diag)
        b = -2.0 * (H.T @ y)
        c = float(y @ y + diag.sum())
        self._quad = QuadraticSpinObjective(J, b=b, c=c)

    @property
    def n(self) -> int:
        return self.H.shape[1]

    def residual(self, x: np.ndarray) -> float:
        x = self._check_x(x)
        r = self.H @ x.astype(np.float64) - self.y
        return float(r @ r)

    def value(self, x: np.ndarray) -> float:
        return self.residual(x)

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        R = X.astype(np.float64) @ self.H.T - self.y
        return (R * R).sum(axis=1)

    def flip_delta(self, x: np.ndarray, i: int) -> float:
        return self._quad.flip_delta(x, i)

    def pair_delta(self, x: np.ndarray, i: int, j: int) -> float:
        return self._quad.pair_delta(x, i, j)

    def batch_state(self, X: np.ndarray) -> MoveState:
        return self._quad.batch_state(X)

    def has_block_structure(self, atol: float = 0.0) -> bool:
        """Whether H has the [[Re, -Im], [Im, Re]] form of a complex channel."""
        M2, N2 = self.H.shape
        if M2 % 2 or N2 % 2:
            return False
        M, N = M2 // 2, N2 // 2
        A, B = self.H[:M, :N], self.H[:M, N:]
        C, D = self.H[M:, :N], self.H[M:, N:]
        return (
            np.allclose(A, D, atol=atol, rtol=0.0)
            and np.allclose(B, -C, atol=atol, rtol=0.0)
        )


def real_reduction(channel_real: np.ndarray, channel_imag: np.ndarray) -> np.ndarray:
    """Stack a complex M x N channel into the 2M x 2N real block matrix."""
    channel_real = np.asarray(channel_real, dtype=np.float64)
    channel_imag = np.asarray(channel_imag, dtype=np.float64)
    if channel_real.shape != channel_imag.shape or channel_real.ndim != 2:
        raise ValueError("real and imaginary channel parts must be equal M x N arrays")
    return np.block([[channel_real, -channel_imag], [channel_imag, channel_real]])


def noise_sigma(snr_db: float, n_symbols: int) -> float:
    """Per-complex-component noise std from the SNR definition.

    With QPSK symbols (|z|^2 = 2) and unit-variance channel entries the
    signal-to-noise ratio is E||H_c x_c||^2 / E||nu_c||^2 = 2N / sigma^2.
    """
    # sqrt(2N / 10^(snr/10)); written to underflow (not overflow) at huge SNR
    return float(np.sqrt(2.0 * n_symbols) * 10.0 ** (-snr_db / 20.0))


def mimo_build(channel_real, channel_imag, x_true, snr_db, rng) -> MimoInstance:
    """Assemble a detection instance from a complex channel and true signal.

    ``x_true`` is the stacked spin vector [Re(x_c); Im(x_c)] of length 2N.
    The observation is y = H x_true + noise, with noise variance set by
    ``snr_db``; the true signal is recorded as ground truth.
    """
    H = real_reduction(channel_real, channel_imag)
    M2, N2 = H.shape
    x_true = np.asarray(x_true, dtype=np.int8)
    if x_true.shape != (N2,):
        raise ValueError(f"x_true must have length {N2}")
    sigma = noise_sigma(snr_db, N2 // 2)
    # Real/imag parts each carry half the complex component variance.
    noise = rng.normal(scale=sigma / np.sqrt(2.0), size=M2)
    y = H @ x_true.astype(np.float64) + noise
    return MimoInstance(H, y, sigma, ground_truth=x_true)
