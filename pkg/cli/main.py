"""
diskrat CLI: pipe-friendly JSON interface to the L2 and Linf solvers.

Every command writes clean JSON to stdout (logs go to stderr). Exit codes:
0 success, 2 bad input or usage, 3 non-convergence or a failed check.
"""
from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from cli import __version__
from l2_irka.optimality import DEFAULT_TOL
from orchestrator.runner import (
    EXIT_INPUT,
    EXIT_NUMERICAL,
    EXIT_OK,
    INIT_CHOICES,
    NORM_CHOICES,
    RunOutcome,
    RunRequest,
    compare as run_compare,
    figures,
    run_request,
    verify_run,
)
from shared.errors import ApproxError, InputError
from shared.storage import dumps, samples_csv, write_json, write_text

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _die(msg: str, code: int = EXIT_INPUT) -> None:
    """Print an error object to stderr and exit with the given code."""
    click.echo(json.dumps({"error": msg}), err=True)
    sys.exit(code)


def _output(data: Any, fmt: str = "json") -> None:
    if fmt == "table":
        _print_table(data)
    else:
        click.echo(dumps(data), nl=False)


def _print_table(rows: Any) -> None:
    """Columnar table for a list of dicts; key/value lines otherwise."""
    if isinstance(rows, list):
        if not rows:
            click.echo("(empty)")
            return
        keys = list(rows[0].keys())
        widths = {k: max(len(k), *(len(str(row.get(k, ""))) for row in rows)) for k in keys}
        click.echo("  ".join(k.ljust(widths[k]) for k in keys))
        click.echo("  ".join("-" * widths[k] for k in keys))
        for row in rows:
            click.echo("  ".join(str(row.get(k, "")).ljust(widths[k]) for k in keys))
    elif isinstance(rows, dict):
        width = max((len(str(k)) for k in rows), default=0)
        for k, v in rows.items():
            click.echo(f"{str(k).ljust(width)}  {v}")
    else:
        click.echo(rows)


def _guarded(action: Callable[[], int]) -> None:
    """Run a command body and map library errors to exit codes."""
    try:
        code = action()
    except InputError as exc:
        _die(str(exc), EXIT_INPUT)
    except ApproxError as exc:
        _die(f"{type(exc).__name__}: {exc}", EXIT_NUMERICAL)
    else:
        sys.exit(code)


def _summary(outcome: RunOutcome) -> Dict[str, Any]:
    out: Dict[str, Any] = {"status": {k: env["status"] for k, env in outcome.envelopes.items()}}
    for norm, result in outcome.results.items():
        out[norm] = {
            "rms": result.stats.rms,
            "sup": result.stats.sup,
            "winding": result.stats.winding,
            "poles": [[p.real, p.imag] for p in result.poles.finite],
            "poles_at_infinity": result.poles.count_at_infinity,
            "converged": result.converged,
        }
    if outcome.errors:
        out["errors"] = outcome.errors
    return out


def request_options(fn: Callable) -> Callable:
    """Options shared by approx and compare."""
    options = [
        click.option("--f", "f", required=True, help="Corpus name (exp4, sqrt11, tanz3, zsq) or an expression in z."),
        click.option("--degree", type=int, required=True, help="Rational degree n >= 1."),
        click.option("--samples", type=int, default=None, help="Solver grid size M (default 200)."),
        click.option("--tol", type=float, default=None, help="IRKA pole-displacement tolerance."),
        click.option("--max-iter", "max_iter", type=int, default=None, help="Iteration cap for both solvers."),
        click.option("--init", type=click.Choice(sorted(INIT_CHOICES)), default=None, help="IRKA initial poles."),
        click.option(
            "--profile",
            "profile_path",
            type=click.Path(dir_okay=False),
            default=None,
            help="YAML with optional l2_irka / linf_lawson / diagnostics sections.",
        ),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


# ---------------------------------------------------------------------------
# CLI group
# ---------------------------------------------------------------------------

@click.group()
@click.option(
    "--log-level",
    envvar="LOG_LEVEL",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default="WARNING",
    show_default=True,
    help="Logging level for stderr.",
)
@click.version_option(version=__version__, prog_name="diskrat")
@click.pass_context
def cli(ctx: click.Context, log_level: str) -> None:
    """Best L2 and Linf rational approximation on the unit disk.

    Results are JSON on stdout or in the files named by --json, --csv and --svg.
    """
    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)
    ctx.ensure_object(dict)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@cli.command()
@request_options
@click.option("--norm", type=click.Choice(NORM_CHOICES), default="both", show_default=True)
@click.option("--json", "json_path", type=click.Path(dir_okay=False), default=None, help="Write the RunResult here.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Write error samples here.")
@click.option("--svg", "svg_prefix", default=None, help="Write <prefix>_error.svg and <prefix>_potential_<norm>.svg.")
def approx(
    f: str,
    degree: int,
    samples: Optional[int],
    tol: Optional[float],
    max_iter: Optional[int],
    init: Optional[str],
    profile_path: Optional[str],
    norm: str,
    json_path: Optional[str],
    csv_path: Optional[str],
    svg_prefix: Optional[str],
) -> None:
    """Compute best approximant(s) of F at the given degree."""

    def body() -> int:
        request = RunRequest(f, degree, norm, samples, tol, max_iter, init, profile_path)
        outcome = run_request(request)
        if svg_prefix:
            for name, svg in figures(outcome).items():
                write_text(Path(f"{svg_prefix}_{name}.svg"), svg)
        if csv_path and outcome.results:
            write_text(Path(csv_path), samples_csv(outcome.error_curves()))
        doc = outcome.to_json()
        if json_path:
            write_json(Path(json_path), doc)
            _output(_summary(outcome))
        else:
            _output(doc)
        return outcome.exit_code

    _guarded(body)


@cli.command()
@request_options
@click.option(
    "--out-dir",
    "out_dir",
    type=click.Path(file_okay=False),
    required=True,
    help="Existing directory for result.json, samples.csv and the figures.",
)
def compare(
    f: str,
    degree: int,
    samples: Optional[int],
    tol: Optional[float],
    max_iter: Optional[int],
    init: Optional[str],
    profile_path: Optional[str],
    out_dir: str,
) -> None:
    """Both norms side by side: ordering check, error figure, potential figures."""

    def body() -> int:
        request = RunRequest(f, degree, "both", samples, tol, max_iter, init, profile_path)
        outcome, written = run_compare(request, Path(out_dir))
        summary = _summary(outcome)
        summary["written"] = {name: str(path) for name, path in written.items()}
        if outcome.ordering is not None:
            summary["ordering"] = outcome.ordering.to_dict()
        _output(summary)
        return outcome.exit_code

    _guarded(body)


@cli.command()
@click.option("--verify", "json_path", type=click.Path(dir_okay=False), required=True, help="RunResult JSON to check.")
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True, help="Residual tolerance.")
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["json", "table"], case_sensitive=False),
    default="table",
    show_default=True,
)
def verify(json_path: str, tol: float, fmt: str) -> None:
    """Reload a saved approximant and recheck its optimality conditions."""

    def body() -> int:
        report = verify_run(Path(json_path), tol)
        if fmt == "table":
            _print_table(report.rows())
            click.echo("PASS" if report.passed else f"FAIL: {', '.join(report.failures())}")
        else:
            _output(report.to_dict())
        return EXIT_OK if report.passed else EXIT_NUMERICAL

    _guarded(body)


if __name__ == "__main__":
    cli()
