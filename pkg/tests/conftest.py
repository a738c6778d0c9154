import numpy as np
import pytest

from mcpg import MaxCutInstance, QuboInstance
from mcpg.instances import gen_maxsat


def random_maxcut(rng, n=10, p=0.5, weighted=True):
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = float(rng.integers(1, 10)) if weighted else 1.0
                edges.append((i, j, w))
    if not edges:
        edges.append((0, 1, 1.0))
    return MaxCutInstance(n, edges)


def random_qubo(rng, n=10, density=0.6, integer=True):
    rows, cols, vals = [], [], []
    for i in range(n):
        for j in range(i, n):
            if rng.random() < density:
                v = float(rng.integers(-9, 10)) if integer else float(rng.normal())
                if v != 0:
                    rows.append(i)
                    cols.append(j)
                    vals.append(v)
    if not vals:
        rows, cols, vals = [0], [0], [1.0]
    return QuboInstance(n, rows, cols, vals)


def random_maxsat(rng, n=10):
    return gen_maxsat(n, (n, 3, 4, 1), seed=int(rng.integers(1 << 31)))


def random_spins(rng, shape):
    return np.where(rng.random(shape) < 0.5, 1, -1).astype(np.int8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def triangle():
    return MaxCutInstance(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
