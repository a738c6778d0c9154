"""Command-line front-end: solve, generate, evaluate, and bench."""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import instances as inst_io
from .filters import filter_from_name
from .metrics import metric_ber, metric_gap, metric_p_ratio
from .oracle import MAX_BRUTE_N, brute_force_min
from .problems import CheegerObjective, as_spins
from .reports import RunReport, render_bench_figure, write_report
from .trainer import TrainConfig, run

PROBLEMS = ("maxcut", "qubo", "maxsat", "mimo", "rcc", "ncc")
MAX_FORM = ("maxcut", "qubo", "maxsat")  # problems reported in max convention


def _load(problem: str, path: str):
    """Returns (objective, problem metadata)."""
    text = Path(path).read_text()
    meta = {"kind": problem, "source": str(path)}
    if problem in ("maxcut", "rcc", "ncc"):
        graph = inst_io.parse_gset(text)
        meta["n"] = graph.n
        meta["edges"] = graph.num_edges
        if problem == "maxcut":
            return graph, meta
        return CheegerObjective(graph, problem), meta
    if problem == "qubo":
        q = inst_io.parse_qubo(text)
        meta["n"] = q.n
        meta["nnz"] = q.nnz
        return q, meta
    if problem == "maxsat":
        s = inst_io.parse_wcnf(text)
        meta["n"] = s.n
        meta["clauses"] = s.num_clauses
        meta["hard_clauses"] = int(s.hard_flags.sum())
        return s, meta
    if problem == "mimo":
        m = inst_io.load_mimo_json(text)
        meta["n"] = m.n
        meta["observations"] = int(m.H.shape[0])
        return m, meta
    raise click.ClickException(f"unknown problem {problem!r}")


def _report_objective(problem: str, obj, x) -> float:
    if problem == "maxcut":
        return obj.cut_weight(x)
    if problem == "qubo":
        return obj.max_objective(x)
    if problem == "maxsat":
        return obj.satisfied_soft(x)
    return obj.value(x)  # mimo residual / Cheeger ratio: already min form


def _solution_metrics(problem: str, obj, x, ub: float | None) -> dict:
    metrics: dict = {}
    reported = _report_objective(problem, obj, x)
    if problem in MAX_FORM and ub is not None:
        metrics["gap_percent"] = metric_gap(ub, reported)
    if problem == "maxcut":
        degrees = obj.degrees()
        if degrees.size and np.all(degrees == degrees[0]) and degrees[0] >= 1:
            metrics["p_ratio"] = metric_p_ratio(reported, obj.n, int(degrees[0]))
    if problem == "maxsat":
        metrics["hard_clauses_satisfied"] = obj.hard_satisfied(x)
        metrics["satisfied_soft_weight"] = obj.satisfied_soft(x)
    if problem == "mimo" and obj.ground_truth is not None:
        metrics["ber"] = metric_ber(x, obj.ground_truth)
    return metrics


def _config_options(f):
    opts = [
        click.option("--epochs", default=100, show_default=True, type=int),
        click.option("--starts", "-k", default=8, show_default=True, type=int,
                     help="number of chain starting points (k)"),
        click.option("--chains", "-m", default=16, show_default=True, type=int,
                     help="chains per starting point (m)"),
        click.option("--transitions", "-t", default=10, show_default=True, type=int,
                     help="MH transitions per chain (t)"),
        click.option("--lambda0", default=None, type=float,
                     help="initial entropy weight (default: 0.1 x first-epoch spread)"),
        click.option("--lambda-decay", default=0.97, show_default=True, type=float),
        click.option("--step-c", default=0.1, show_default=True, type=float,
                     help="stepsize constant c in c*sqrt(mk)/sqrt(epoch)"),
        click.option("--alpha", default=0.2, show_default=True, type=float,
                     help="probability floor of the sampling policy"),
        click.option("--filter", "filter_name", default="ls", show_default=True,
                     type=click.Choice(["none", "kflip1", "kflip2", "ls", "edge-ls"])),
        click.option("--variant", default="mcpg", show_default=True,
                     type=click.Choice(["mcpg", "mcpg-u", "mcpg-p"])),
        click.option("--optimizer", default="sgd", show_default=True,
                     type=click.Choice(["sgd", "adam"])),
        click.option("--pretrain-epochs", default=50, show_default=True, type=int),
        click.option("--seed", default=0, show_default=True, type=int),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _build_config(**kw) -> TrainConfig:
    try:
        return TrainConfig(
            epochs=kw["epochs"],
            starts=kw["starts"],
            chains=kw["chains"],
            transitions=kw["transitions"],
            alpha=kw["alpha"],
            filter_kind=filter_from_name(kw["filter_name"]),
            variant=kw["variant"],
            lambda0=kw["lambda0"],
            lambda_decay=kw["lambda_decay"],
            step_c=kw["step_c"],
            optimizer=kw["optimizer"],
            pretrain_epochs=kw["pretrain_epochs"],
            seed=kw["seed"],
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))


def _echo_config(config: TrainConfig, filter_name: str, lambda0: float) -> dict:
    return {
        "epochs": config.epochs,
        "starts": config.starts,
        "chains": config.chains,
        "transitions": config.transitions,
        "alpha": config.alpha,
        "filter": filter_name,
        "variant": config.variant,
        "lambda0": lambda0,
        "lambda_decay": config.lambda_decay,
        "step_c": config.step_c,
        "optimizer": config.optimizer,
        "pretrain_epochs": config.pretrain_epochs,
    }


@click.group()
def main():
    """Monte Carlo policy-gradient solver for binary optimization."""


@main.command()
@click.argument("problem", type=click.Choice(PROBLEMS))
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@_config_options
@click.option("--ub", default=None, type=float, help="best-known value for gap reporting")
@click.option("--out", default=None, type=click.Path(dir_okay=False), help="report file")
@click.option("--format", "fmt", default="json", show_default=True,
              type=click.Choice(["json", "text"]))
@click.option("--plot/--no-plot", default=True, show_default=True,
              help="render a convergence figure next to --out")
def solve(problem, input_path, ub, out, fmt, plot, filter_name, **kw):
    """Solve one instance and emit a structured run report."""
    try:
        obj, meta = _load(problem, input_path)
    except (inst_io.ParseError, ValueError, OSError) as exc:
        raise click.ClickException(f"cannot load {input_path}: {exc}")
    config = _build_config(filter_name=filter_name, **kw)
    t0 = time.perf_counter()
    result = run(config, obj)
    wall = time.perf_counter() - t0
    x = result.best_solution
    report = RunReport(
        problem=meta,
        config=_echo_config(config, filter_name, result.lambda0),
        seed=config.seed,
        assignment=[int(v) for v in x],
        objective=_report_objective(problem, obj, x),
        objective_min_form=result.best_value,
        metrics=_solution_metrics(problem, obj, x, ub),
        wall_seconds=wall,
        history=result.history,
    )
    if out:
        fig = write_report(report, out, fmt, plot)
        click.echo(f"report written to {out}" + (f" (figure: {fig})" if fig else ""))
    else:
        click.echo(report.to_json() if fmt == "json" else report.to_text())


@main.command()
@click.argument("family", type=click.Choice(["regular", "nbiq", "maxsat", "mimo"]))
@click.option("--n", default=None, type=int, help="variables / nodes")
@click.option("--d", default=5, show_default=True, type=int, help="regular degree")
@click.option("--density", default=0.8, show_default=True, type=float)
@click.option("--neg-prob", default=None, type=float,
              help="probability of a negative weight (required for nbiq)")
@click.option("--c2", default=0, show_default=True, type=int)
@click.option("--c3", default=0, show_default=True, type=int)
@click.option("--c4", default=0, show_default=True, type=int)
@click.option("--m-dim", default=32, show_default=True, type=int, help="MIMO receive dim M")
@click.option("--n-dim", default=32, show_default=True, type=int, help="MIMO send dim N")
@click.option("--snr", default=8.0, show_default=True, type=float, help="SNR in dB")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def generate(family, n, d, density, neg_prob, c2, c3, c4, m_dim, n_dim, snr, seed, out):
    """Generate an instance file in the matching text format."""
    try:
        if family == "regular":
            if n is None:
                raise ValueError("--n is required for regular graphs")
            text = inst_io.emit_gset(inst_io.gen_regular_graph(n, d, seed))
        elif family == "nbiq":
            if n is None:
                raise ValueError("--n is required for nbiq")
            if neg_prob is None:
                raise ValueError("--neg-prob is required for nbiq")
            text = inst_io.emit_qubo(inst_io.gen_nbiq(n, density, neg_prob, seed))
        elif family == "maxsat":
            if n is None:
                raise ValueError("--n is required for maxsat")
            text = inst_io.emit_wcnf(inst_io.gen_maxsat(n, (n, c2, c3, c4), seed))
        else:
            text = inst_io.dump_mimo_json(inst_io.gen_mimo(m_dim, n_dim, snr, seed)) + "\n"
    except (ValueError, RuntimeError) as exc:
        raise click.ClickException(str(exc))
    Path(out).write_text(text)
    click.echo(f"{family} instance written to {out}")


@main.command()
@click.argument("problem", type=click.Choice(PROBLEMS))
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("solution_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--ub", default=None, type=float)
def evaluate(problem, input_path, solution_path, ub):
    """Re-evaluate a stored solution or report file against its instance."""
    try:
        obj, meta = _load(problem, input_path)
        payload = json.loads(Path(solution_path).read_text())
        x = as_spins(payload["assignment"], obj.n)
    except (inst_io.ParseError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"invalid input: {exc}")
    reported = _report_objective(problem, obj, x)
    result = {
        "problem": meta,
        "objective": reported,
        "objective_min_form": obj.value(x),
        "metrics": _solution_metrics(problem, obj, x, ub),
    }
    if "objective" in payload and payload["objective"] is not None:
        recorded = float(payload["objective"])
        result["recorded_objective"] = recorded
        result["matches_recorded"] = bool(np.isclose(recorded, reported, rtol=0, atol=1e-9))
    click.echo(json.dumps(result, indent=2, sort_keys=True, default=float))
    if result.get("matches_recorded") is False:
        sys.exit(1)


@main.command()
@click.argument("problem", type=click.Choice(PROBLEMS))
@click.argument("input_path", type=click.Path(exists=True, dir_okay=False))
@_config_options
@click.option("--repeats", "-r", default=20, show_default=True, type=int)
@click.option("--ub", default=None, type=float,
              help="reference for gaps (default: brute force if n small, else best found)")
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="CSV output path (a figure is rendered alongside)")
@click.option("--plot/--no-plot", default=True, show_default=True)
def bench(problem, input_path, repeats, ub, out, plot, filter_name, **kw):
    """Aggregate best/mean gap and mean time over independently seeded runs."""
    if repeats < 1:
        raise click.ClickException("repeats must be >= 1")
    try:
        obj, meta = _load(problem, input_path)
    except (inst_io.ParseError, ValueError, OSError) as exc:
        raise click.ClickException(f"cannot load {input_path}: {exc}")
    base = _build_config(filter_name=filter_name, **kw)
    seeds = [int(s) for s in np.random.SeedSequence(base.seed).generate_state(repeats)]

    objectives, times = [], []
    for s in seeds:
        config = TrainConfig(
            epochs=base.epochs, starts=base.starts, chains=base.chains,
            transitions=base.transitions, alpha=base.alpha,
            filter_kind=base.filter_kind, variant=base.variant,
            lambda0=base.lambda0, lambda_decay=base.lambda_decay,
            step_c=base.step_c, optimizer=base.optimizer,
            pretrain_epochs=base.pretrain_epochs, seed=s,
        )
        t0 = time.perf_counter()
        result = run(config, obj)
        times.append(time.perf_counter() - t0)
        objectives.append(_report_objective(problem, obj, result.best_solution))

    use_max = problem in MAX_FORM
    if ub is None and use_max and obj.n <= MAX_BRUTE_N:
        xstar, _, _ = brute_force_min(obj)
        ub = _report_objective(problem, obj, xstar)
    if ub is None and use_max:
        ub = max(objectives)

    header = ["instance", "problem", "repeats", "ub", "best_obj", "mean_obj",
              "best_gap", "mean_gap", "mean_time"]
    best_obj = max(objectives) if use_max else min(objectives)
    gaps = [metric_gap(ub, o) for o in objectives] if use_max else None
    row = [
        Path(input_path).name,
        problem,
        str(repeats),
        f"{ub:.6g}" if ub is not None else "-",
        f"{best_obj:.6g}",
        f"{np.mean(objectives):.6g}",
        f"{min(gaps):.2f}" if gaps else "-",
        f"{np.mean(gaps):.2f}" if gaps else "-",
        f"{np.mean(times):.2f}",
    ]
    table = ",".join(header) + "\n" + ",".join(row) + "\n"
    click.echo(table, nl=False)
    if out:
        Path(out).write_text(table)
        if plot:
            render_bench_figure(objectives, ub if use_max else None,
                                Path(out).with_suffix(".png"))


if __name__ == "__main__":
    main()
