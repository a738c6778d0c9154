"""Instance file formats and deterministic generators.

Formats
-------
* Gset graphs: header ``n m`` then m lines ``i j w`` with 1-based ids.
* DIMACS WCNF: ``p wcnf n m top``; clause lines ``w l1 ... lk 0``; a
  clause with weight equal to ``top`` is hard.
* QUBO triplets: header ``n nnz`` then nnz lines ``i j q`` (1-based,
  upper triangle including the diagonal).
* MIMO detection instances: a JSON object with the complex channel,
  observation, noise level, and ground truth.

Generators are pure functions of their parameters and seed.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .problems.maxcut import MaxCutInstance
from .problems.maxsat import MaxSatInstance
from .problems.mimo import MimoInstance, mimo_build
from .problems.qubo import QuboInstance

__all__ = [
    "GeneratorSpec",
    "parse_gset",
    "emit_gset",
    "parse_wcnf",
    "emit_wcnf",
    "parse_qubo",
    "emit_qubo",
    "load_mimo_json",
    "dump_mimo_json",
    "gen_regular_graph",
    "gen_nbiq",
    "gen_maxsat",
    "gen_mimo",
]


class ParseError(ValueError):
    pass


def _numeric_lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", "%")):
            continue
        yield lineno, stripped


# -- Gset ---------------------------------------------------------------


def parse_gset(text: str) -> MaxCutInstance:
    lines = list(_numeric_lines(text))
    if not lines:
        raise ParseError("empty Gset file")
    header = lines[0][1].split()
    if len(header) != 2:
        raise ParseError(f"malformed Gset header: {lines[0][1]!r}")
    n, m = int(header[0]), int(header[1])
    if len(lines) - 1 != m:
        raise ParseError(f"header claims {m} edges, found {len(lines) - 1}")
    merged: dict[tuple[int, int], float] = {}
    dupes = 0
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'i j w'")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        w = float(parts[2])
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(f"line {lineno}: node id out of range")
        if i == j:
            raise ParseError(f"line {lineno}: self-loop")
        key = (min(i, j), max(i, j))
        if key in merged:
            dupes += 1
            merged[key] += w
        else:
            merged[key] = w
    if dupes:
        warnings.warn(f"{dupes} duplicate edge(s); weights were summed", stacklevel=2)
    return MaxCutInstance(n, [(i, j, w) for (i, j), w in merged.items()])


def emit_gset(inst: MaxCutInstance) -> str:
    lines = [f"{inst.n} {inst.num_edges}"]
    for u, v, w in zip(inst.edge_u, inst.edge_v, inst.edge_w):
        wtxt = f"{int(w)}" if float(w).is_integer() else repr(float(w))
        lines.append(f"{u + 1} {v + 1} {wtxt}")
    return "\n".join(lines) + "\n"


# -- DIMACS WCNF --------------------------------------------------------


def parse_wcnf(text: str) -> MaxSatInstance:
    n = None
    m = None
    top = None
    clauses: list[tuple[tuple[int, ...], float]] = []
    hard: list[bool] = []
    for lineno, line in _numeric_lines(text):
        if line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) not in (4, 5) or parts[1] != "wcnf":
                raise ParseError(f"line {lineno}: malformed problem line")
            n, m = int(parts[2]), int(parts[3])
            top = float(parts[4]) if len(parts) == 5 else None
            continue
        if n is None:
            raise ParseError(f"line {lineno}: clause before problem line")
        parts = line.split()
        if parts[-1] != "0":
            raise ParseError(f"line {lineno}: clause not terminated by 0")
        w = float(parts[0])
        lits = tuple(int(tok) for tok in parts[1:-1])
        if not lits:
            raise ParseError(f"line {lineno}: zero-variable clause")
        if any(l == 0 or abs(l) > n for l in lits):
            raise ParseError(f"line {lineno}: literal out of range")
        clauses.append((lits, w))
        hard.append(top is not None and w == top)
    if n is None:
        raise ParseError("missing problem line")
    if len(clauses) != m:
        raise ParseError(f"header claims {m} clauses, found {len(clauses)}")
    # The solver weights hard clauses as (number of soft clauses) + 1, so
    # the parsed hard weight is normalized away from the file's top value.
    soft_count = sum(1 for h in hard if not h)
    norm = [
        (lits, float(soft_count + 1) if h else w)
        for (lits, w), h in zip(clauses, hard)
    ]
    return MaxSatInstance(n, norm, hard)


def emit_wcnf(inst: MaxSatInstance) -> str:
    top = inst.soft_count + 1
    soft_w = inst.weights[~inst.hard_flags]
    if soft_w.size and soft_w.max() >= top:
        warnings.warn("a soft weight reaches the hard-clause marker", stacklevel=2)
    lines = [f"p wcnf {inst.n} {inst.num_clauses} {top}"]
    for lits, w, h in zip(inst.clause_literals, inst.weights, inst.hard_flags):
        wtxt = top if h else (int(w) if float(w).is_integer() else w)
        lines.append(f"{wtxt} " + " ".join(str(l) for l in lits) + " 0")
    return "\n".join(lines) + "\n"


# -- QUBO triplets -------------------------------------------------------


def parse_qubo(text: str) -> QuboInstance:
    lines = list(_numeric_lines(text))
    if not lines:
        raise ParseError("empty QUBO file")
    header = lines[0][1].split()
    if len(header) != 2:
        raise ParseError(f"malformed QUBO header: {lines[0][1]!r}")
    n, nnz = int(header[0]), int(header[1])
    if len(lines) - 1 != nnz:
        raise ParseError(f"header claims {nnz} entries, found {len(lines) - 1}")
    rows, cols, vals = [], [], []
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 'i j q'")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(f"line {lineno}: index out of range")
        rows.append(i)
        cols.append(j)
        vals.append(float(parts[2]))
    return QuboInstance(n, rows, cols, vals)


def emit_qubo(inst: QuboInstance) -> str:
    lines = [f"{inst.n} {inst.nnz}"]
    for i, j, q in zip(inst.rows, inst.cols, inst.vals):
        qtxt = f"{int(q)}" if float(q).is_integer() else repr(float(q))
        lines.append(f"{i + 1} {j + 1} {qtxt}")
    return "\n".join(lines) + "\n"


# -- MIMO JSON -----------------------------------------------------------


def dump_mimo_json(inst: MimoInstance) -> str:
    payload = {
        "H": inst.H.tolist(),
        "y": inst.y.tolist(),
        "sigma": inst.sigma,
        "ground_truth": None
        if inst.ground_truth is None
        else inst.ground_truth.tolist(),
    }
    return json.dumps(payload)


def load_mimo_json(text: str) -> MimoInstance:
    try:
        payload = json.loads(text)
        return MimoInstance(
            np.asarray(payload["H"], dtype=np.float64),
            np.asarray(payload["y"], dtype=np.float64),
            float(payload["sigma"]),
            None
            if payload.get("ground_truth") is None
            else np.asarray(payload["ground_truth"], dtype=np.int8),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed MIMO instance: {exc}") from exc


# -- generators ----------------------------------------------------------


def gen_regular_graph(n: int, d: int, seed: int) -> MaxCutInstance:
    """Random d-regular graph with unit weights (configuration pairing).

    Conflicting stubs are progressively re-paired; a stuck pairing is
    rejected and the whole construction retried (up to 100 times).
    """
    if (n * d) % 2 != 0:
        raise ValueError("n * d must be even")
    if not 0 < d < n:
        raise ValueError("need 0 < d < n")
    rng = np.random.default_rng(seed)

    def try_pairing():
        edges: set[tuple[int, int]] = set()
        stubs = list(range(n)) * d
        while stubs:
            leftover: dict[int, int] = {}
            rng.shuffle(stubs)
            it = iter(stubs)
            for a, b in zip(it, it):
                if a > b:
                    a, b = b, a
                if a != b and (a, b) not in edges:
                    edges.add((a, b))
                else:
                    leftover[a] = leftover.get(a, 0) + 1
                    leftover[b] = leftover.get(b, 0) + 1
            if leftover and not _repairable(edges, leftover):
                return None
            stubs = [v for v, cnt in leftover.items() for _ in range(cnt)]
        return edges

    for _ in range(100):
        edges = try_pairing()
        if edges is not None:
            return MaxCutInstance(n, [(a, b, 1.0) for a, b in sorted(edges)])
    raise RuntimeError(f"could not realize a simple {d}-regular graph on {n} nodes")


def _repairable(edges: set, leftover: dict) -> bool:
    # Some pair of leftover stubs must still admit a fresh edge.
    nodes = sorted(leftover)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            if (a, b) not in edges:
                return True
    return False


def gen_nbiq(n: int, density: float = 0.8, neg_prob: float = 0.3, seed: int = 0) -> QuboInstance:
    """Dense random QUBO: magnitudes U[10, 100], sign flips, given density.

    Density counts stored upper-triangle entries (diagonal included).
    """
    if not 0 < density <= 1:
        raise ValueError("density must be in (0, 1]")
    if not 0 <= neg_prob <= 1:
        raise ValueError("neg_prob must be in [0, 1]")
    rng = np.random.default_rng(seed)
    rows, cols, vals = [], [], []
    for i in range(n):
        width = n - i
        mask = rng.random(width) < density
        js = i + np.nonzero(mask)[0]
        mags = rng.uniform(10.0, 100.0, size=js.size)
        signs = np.where(rng.random(js.size) < neg_prob, -1.0, 1.0)
        rows.append(np.full(js.size, i, dtype=np.int64))
        cols.append(js)
        vals.append(mags * signs)
    return QuboInstance(
        n,
        np.concatenate(rows) if rows else [],
        np.concatenate(cols) if cols else [],
        np.concatenate(vals) if vals else [],
    )


def gen_maxsat(n: int, counts: tuple, seed: int = 0) -> MaxSatInstance:
    """Random MaxSAT instance mixing the four structural clause types.

    counts = (c1, c2, c3, c4); c1 is accepted for symmetry but ignored:
    type-1 unit clauses are emitted once per variable.  Type 2 adds
    2*c2 clauses (a1 | a2 and !a1 | !a2), type 3 adds c3 random
    3-clauses, and type 4 adds 3*c4 clauses (one 4-clause plus its two
    guarding binaries).  All clauses are soft with unit weight.
    """
    _, c2, c3, c4 = (int(c) for c in counts)
    if min(c2, c3, c4) < 0:
        raise ValueError("counts must be nonnegative")
    if (c2 and n < 2) or (c3 and n < 3) or (c4 and n < 4):
        raise ValueError("n too small for the requested clause arities")
    rng = np.random.default_rng(seed)
    clauses: list[tuple[tuple[int, ...], float]] = []
    for v in range(1, n + 1):
        sign = 1 if rng.random() < 0.5 else -1
        clauses.append(((sign * v,), 1.0))
    for _ in range(c2):
        a1, a2 = rng.choice(n, size=2, replace=False) + 1
        clauses.append(((int(a1), int(a2)), 1.0))
        clauses.append(((-int(a1), -int(a2)), 1.0))
    for _ in range(c3):
        a = rng.choice(n, size=3, replace=False) + 1
        signs = np.where(rng.random(3) < 0.5, 1, -1)
        clauses.append((tuple(int(s * v) for s, v in zip(signs, a)), 1.0))
    for _ in range(c4):
        a1, a2, a3, a4 = (int(v) for v in rng.choice(n, size=4, replace=False) + 1)
        clauses.append(((a1, a2, a3, a4), 1.0))
        clauses.append(((-a1, -a2), 1.0))
        clauses.append(((-a3, -a4), 1.0))
    return MaxSatInstance(n, clauses)


def gen_mimo(M: int, N: int, snr_db: float, seed: int = 0) -> MimoInstance:
    """Random detection instance: i.i.d. standard complex Gaussian channel,
    uniform QPSK signal, noise variance matched to the target SNR.

    For a fixed seed the channel, signal, and the unscaled noise draws
    are identical across SNR levels, so BER curves over SNR are coupled.
    """
    if M < 1 or N < 1:
        raise ValueError("M and N must be >= 1")
    rng = np.random.default_rng(seed)
    # CN(0, 1) entries: real and imaginary parts each N(0, 1/2).
    h_re = rng.normal(scale=np.sqrt(0.5), size=(M, N))
    h_im = rng.normal(scale=np.sqrt(0.5), size=(M, N))
    x_true = np.where(rng.random(2 * N) < 0.5, 1, -1).astype(np.int8)
    return mimo_build(h_re, h_im, x_true, snr_db, rng)


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative generator description: family name, parameters, seed."""

    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    _FAMILIES = ("regular", "nbiq", "maxsat", "mimo")

    def __post_init__(self):
        if self.family not in self._FAMILIES:
            raise ValueError(f"family must be one of {self._FAMILIES}")

    def build(self):
        if self.family == "regular":
            return gen_regular_graph(seed=self.seed, **self.params)
        if self.family == "nbiq":
            return gen_nbiq(seed=self.seed, **self.params)
        if self.family == "maxsat":
            return gen_maxsat(seed=self.seed, **self.params)
        return gen_mimo(seed=self.seed, **self.params)
