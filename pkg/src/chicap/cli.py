"""Batch command-line front end.

All subcommands validate their inputs fully before any computation starts,
write outputs atomically (no partial files), and emit machine-readable JSON
errors on stderr.  Exit codes: 0 success, 1 validation failure, 2 numerical
failure.
"""

from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import counterexample as cx
from . import serialize
from .capacity import SolverOptions, certify_optimality, solve_capacity
from .ensemble import chi as chi_functional
from .ensemble import discretize
from .errors import ChicapError, MaxItersExceeded, NoRoot
from .identities import run_identity_suites

log = logging.getLogger("chicap")

VALIDATION_EXIT = 1
NUMERICAL_EXIT = 2


def _setup_logging() -> None:
    level = os.environ.get("CHICAP_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
            level, logging.ERROR
        )
    )


def _fail(kind: str, exc: Exception, code: int):
    sys.stderr.write(
        json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)})
        + "\n"
    )
    sys.exit(code)


def _load_json(path: str, loader, what: str):
    try:
        with open(path) as f:
            data = json.load(f)
        return loader(data)
    except (OSError, ValueError, KeyError, ChicapError) as exc:
        _fail(f"invalid {what} file", exc, VALIDATION_EXIT)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _write_atomic(Path(out), text)


def _solver_options(tol, max_iter, seed) -> SolverOptions:
    return SolverOptions(
        max_outer_iters=max_iter, tol_gap=tol, seed=seed
    )


common_options = [
    click.option("--out", type=click.Path(), default=None, help="Output path."),
    click.option("--tol", type=float, default=1e-6, show_default=True),
    click.option("--max-iter", type=int, default=200, show_default=True),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--threads", type=int, default=1, show_default=True,
                 help="Worker cap (modules currently run sequentially)."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                 default="json", show_default=True),
]


def _with_common(cmd):
    for opt in reversed(common_options):
        cmd = opt(cmd)
    return cmd


@click.group()
def main() -> None:
    """Chi-capacity toolkit for input-constrained channels."""
    _setup_logging()


@main.command("chi")
@click.option("--channel", "channel_path", type=click.Path(exists=True), required=True)
@click.option("--ensemble", "ensemble_path", type=click.Path(exists=True), required=True)
@_with_common
def chi_cmd(channel_path, ensemble_path, out, tol, max_iter, seed, threads, fmt):
    """Evaluate the chi functional for a channel and an ensemble."""
    phi = _load_json(channel_path, serialize.channel_from_dict, "channel")
    pi = _load_json(ensemble_path, serialize.ensemble_from_dict, "ensemble")
    value = chi_functional(phi, pi)
    _emit(serialize.dumps({"chi": value}), out)


@main.command("capacity")
@click.option("--channel", "channel_path", type=click.Path(exists=True), required=True)
@click.option("--constraint", "constraint_path", type=click.Path(exists=True), default=None)
@_with_common
def capacity_cmd(channel_path, constraint_path, out, tol, max_iter, seed, threads, fmt):
    """Solve for the (optionally energy-constrained) chi-capacity."""
    phi = _load_json(channel_path, serialize.channel_from_dict, "channel")
    constraint = None
    if constraint_path is not None:
        constraint = _load_json(
            constraint_path, serialize.constraint_from_dict, "constraint"
        )
    try:
        report = solve_capacity(phi, constraint, _solver_options(tol, max_iter, seed))
    except MaxItersExceeded as exc:
        _fail("solver did not converge", exc, NUMERICAL_EXIT)
    if fmt == "csv":
        _emit(serialize.trace_to_csv(report), out)
    else:
        _emit(serialize.dumps(serialize.report_to_dict(report)), out)
    if out is not None:
        stem = Path(out)
        _write_atomic(stem.with_suffix(".trace.csv"), serialize.trace_to_csv(report))
        from .plots import convergence_figure

        convergence_figure(report, stem.with_suffix(".png"))


@main.command("certify")
@click.option("--channel", "channel_path", type=click.Path(exists=True), required=True)
@click.option("--ensemble", "ensemble_path", type=click.Path(exists=True), required=True)
@click.option("--constraint", "constraint_path", type=click.Path(exists=True), default=None)
@_with_common
def certify_cmd(
    channel_path, ensemble_path, constraint_path, out, tol, max_iter, seed, threads, fmt
):
    """Maximal-distance optimality certificate for a given ensemble."""
    phi = _load_json(channel_path, serialize.channel_from_dict, "channel")
    pi = _load_json(ensemble_path, serialize.ensemble_from_dict, "ensemble")
    constraint = None
    if constraint_path is not None:
        constraint = _load_json(
            constraint_path, serialize.constraint_from_dict, "constraint"
        )
    result = certify_optimality(phi, pi, constraint, _solver_options(tol, max_iter, seed))
    _emit(serialize.dumps(serialize.certificate_to_dict(result, tol)), out)


@main.command("counterexample")
@click.option("--nmax", type=int, default=10**6, show_default=True)
@_with_common
def counterexample_cmd(nmax, out, tol, max_iter, seed, threads, fmt):
    """Capacity-approach sweep for the channel with no optimal ensemble.

    With --out, writes the CSV table, a JSON gap report and a figure with
    the same stem.
    """
    try:
        report = cx.gap_report(nmax)
    except (NoRoot, ValueError) as exc:
        _fail("counterexample sweep failed", exc, NUMERICAL_EXIT)
    if fmt == "csv":
        _emit(serialize.counterexample_to_csv(report.points), out)
        if out is not None:
            _write_atomic(
                Path(out).with_suffix(".json"),
                serialize.dumps(serialize.gap_report_to_dict(report)),
            )
    else:
        _emit(serialize.dumps(serialize.gap_report_to_dict(report)), out)
        if out is not None:
            _write_atomic(
                Path(out).with_suffix(".csv"),
                serialize.counterexample_to_csv(report.points),
            )
    if out is not None:
        from .plots import counterexample_figure

        counterexample_figure(report.points, Path(out).with_suffix(".png"))


@main.command("discretize")
@click.option("--measure", "measure_path", type=click.Path(exists=True), required=True)
@click.option("--resolution", type=int, required=True,
              help="Cells have trace-norm diameter below 1/resolution.")
@_with_common
def discretize_cmd(measure_path, resolution, out, tol, max_iter, seed, threads, fmt):
    """Reduce a sampled measure to a small ensemble with the same barycenter."""
    mu = _load_json(measure_path, serialize.ensemble_from_dict, "measure")
    try:
        reduced = discretize(mu, resolution)
    except ChicapError as exc:
        _fail("discretization failed", exc, VALIDATION_EXIT)
    _emit(serialize.dumps(serialize.ensemble_to_dict(reduced)), out)


@main.command("identities")
@click.option("--trials", type=int, default=100, show_default=True)
@_with_common
def identities_cmd(trials, out, tol, max_iter, seed, threads, fmt):
    """Run the randomized residual suites and print a pass/fail table."""
    results = run_identity_suites(seed=seed, trials=trials)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        click.echo(
            f"{r.name:<{width}}  max_residual={r.max_residual:.3e}  "
            f"tol={r.tolerance:.0e}  {status}"
        )
    if out is not None:
        _emit(
            serialize.dumps(
                [
                    {
                        "suite": r.name,
                        "max_residual": r.max_residual,
                        "tolerance": r.tolerance,
                        "passed": r.passed,
                    }
                    for r in results
                ]
            ),
            out,
        )
    if not all(r.passed for r in results):
        sys.exit(NUMERICAL_EXIT)


if __name__ == "__main__":
    main()
