"""Structured run reports: JSON, delimited text, and rendered figures.

A report is self-contained: re-running the echoed config with the
echoed seed reproduces the best objective exactly.  When a report is
written to a file, a matplotlib convergence figure is rendered next to
it (same stem, .png) unless plotting is disabled.
"""

from __future__ import annotations

import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["RunReport", "write_report", "render_history_figure", "render_bench_figure"]

TEXT_COLUMNS = ["problem", "n", "variant", "filter", "seed", "objective", "best_min_value", "time"]


def _py(value):
    """Recursively convert numpy scalars/arrays for JSON serialization."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _py(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_py(v) for v in value]
    return value


def hardware_info() -> dict:
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "processor": platform.processor() or "unknown",
    }


@dataclass
class RunReport:
    problem: dict
    config: dict
    seed: int
    assignment: list
    objective: float            # reported convention (cut weight, x^T Q x, ...)
    objective_min_form: float   # internal minimization value
    metrics: dict
    wall_seconds: float
    history: list
    hardware: dict = field(default_factory=hardware_info)

    def to_dict(self) -> dict:
        return _py(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def text_header(self) -> str:
        return "\t".join(TEXT_COLUMNS)

    def to_text(self) -> str:
        """One delimited row mirroring the benchmark table columns."""
        row = [
            str(self.problem.get("kind", "?")),
            str(self.problem.get("n", "?")),
            str(self.config.get("variant", "?")),
            str(self.config.get("filter", "?")),
            str(self.seed),
            f"{self.objective:.6g}",
            f"{self.objective_min_form:.6g}",
            f"{self.wall_seconds:.2f}",
        ]
        return self.text_header() + "\n" + "\t".join(row)


def render_history_figure(history: list, path, title: str = "") -> None:
    """Best-so-far and batch-mean objective value per epoch."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    epochs = [h["epoch"] for h in history]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(epochs, [h["best_value"] for h in history], label="best so far")
    ax.plot(epochs, [h["batch_mean"] for h in history], label="batch mean", alpha=0.7)
    ax.set_xlabel("epoch")
    ax.set_ylabel("objective (min form)")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_bench_figure(objectives: list, ub: float | None, path) -> None:
    """Best objective per repeat, with the reference value if known."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(range(1, len(objectives) + 1), objectives, "o-", label="best per repeat")
    if ub is not None:
        ax.axhline(ub, color="k", linestyle="--", label="reference UB")
    ax.set_xlabel("repeat")
    ax.set_ylabel("objective")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(report: RunReport, out: str | Path, fmt: str = "json",
                 plot: bool = True) -> Path | None:
    """Write the report and, by default, a convergence figure beside it.

    Returns the figure path when one was rendered.
    """
    out = Path(out)
    if fmt == "json":
        out.write_text(report.to_json() + "\n")
    elif fmt == "text":
        out.write_text(report.to_text() + "\n")
    else:
        raise ValueError("format must be 'json' or 'text'")
    if plot and report.history:
        fig_path = out.with_suffix(".png")
        title = f"{report.problem.get('kind', '')} n={report.problem.get('n', '?')}"
        render_history_figure(report.history, fig_path, title)
        return fig_path
    return None
