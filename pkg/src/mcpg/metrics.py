"""Benchmark metrics: gap to a reference value, P-ratio, bit error rate."""

from __future__ import annotations

import numpy as np

__all__ = ["metric_gap", "metric_p_ratio", "metric_ber"]


def metric_gap(ub: float, obj: float) -> float:
    """(UB - obj) / UB * 100; UB is the best-known maximization value."""
    if ub <= 0:
        raise ValueError("gap is only defined for a positive reference UB")
    return (ub - obj) / ub * 100.0


def metric_p_ratio(cut: float, n: int, d: int) -> float:
    """Size-normalized cut quality (cut/n - d/4) / sqrt(d/4) for d-regular
    graphs; approaches ~0.7632 at the optimum as n grows."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return (cut / n - d / 4.0) / np.sqrt(d / 4.0)


def metric_ber(x, x_true) -> float:
    """Fraction of mismatched entries; 0 exactly on full recovery."""
    x = np.asarray(x)
    x_true = np.asarray(x_true)
    if x.shape != x_true.shape:
        raise ValueError("length mismatch between solution and ground truth")
    return float(np.mean(x != x_true))
