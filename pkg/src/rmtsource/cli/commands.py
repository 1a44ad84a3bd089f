"""CLI command implementations for all rmtsource tasks."""

import json
import sys
from typing import Any, Callable

import click
from pydantic import ValidationError

from rmtsource.config import Settings, get_settings
from rmtsource.core import RunnerCore, load_config_file
from rmtsource.exceptions import EXIT_INVALID, ConfigError, RMTSourceError
from rmtsource.logging import setup_logging
from rmtsource.models import RunConfig

# Keys read from the config file that belong to the run rather than the task.
RUN_KEYS = ("seed", "workers", "output", "format")

# Click identifiers that differ from the task parameter names.
FLAG_KEYS = {"lam": "lambda"}

# Switches that select the charpoly model.
MODEL_FLAGS = ("gauss", "chiral", "wishart", "box")

# Commands whose artifact is a table default to CSV.
DEFAULT_FORMATS = {"softedge": "csv"}


def _output_error(message: str, error_type: str, exit_code: int) -> None:
    """Output an error as JSON to stderr and exit with its code."""
    payload = {"error": message, "type": error_type, "exit_code": exit_code}
    click.echo(json.dumps(payload, indent=2), err=True)
    sys.exit(exit_code)


def _load_settings() -> Settings:
    try:
        return get_settings()
    except ValidationError as exc:
        _output_error(f"Invalid RMTSOURCE_ environment: {exc}", "ConfigError", EXIT_INVALID)
        raise


def _build_config(command: str, flags: dict[str, Any], settings: Settings) -> RunConfig:
    """Merge config-file values with the given flags; flags win."""
    config_path = flags.pop("config", None)
    merged: dict[str, Any] = load_config_file(config_path) if config_path else {}
    models = [name for name in MODEL_FLAGS if flags.pop(name, False)]
    if len(models) > 1:
        raise ConfigError("choose one model, got " + ", ".join(f"--{name}" for name in models))
    if models:
        merged["model"] = models[0]
    for key, value in flags.items():
        if value is not None:
            merged[FLAG_KEYS.get(key, key)] = value

    run = {key: merged.pop(key) for key in RUN_KEYS if key in merged}
    run.setdefault("seed", settings.seed)
    run.setdefault("workers", settings.workers)
    if command in DEFAULT_FORMATS:
        run.setdefault("format", DEFAULT_FORMATS[command])
    return RunConfig(command=command, params=merged, **run)


def _run_command(command: str, flags: dict[str, Any]) -> None:
    """Run one command end to end and translate the result into an exit code."""
    settings = _load_settings()
    setup_logging(settings.log_level)
    try:
        config = _build_config(command, flags, settings)
    except RMTSourceError as exc:
        _output_error(exc.message, type(exc).__name__, exc.exit_code)
        return
    except ValidationError as exc:
        _output_error(str(exc), "ValidationError", EXIT_INVALID)
        return

    result = RunnerCore(settings).run(config)
    if result.error is not None:
        _output_error(result.error, result.error_type or "Error", result.exit_code)
        return
    if not config.output:
        click.echo(result.text, nl=False)
    if result.exit_code != 0:
        _output_error(f"{command} check did not pass", "CheckFailedError", result.exit_code)


def run_options(func: Callable) -> Callable:
    """Options shared by every command."""
    options = [
        click.option("--seed", type=int, default=None, help="Master seed (default: RMTSOURCE_SEED or 0)"),
        click.option(
            "--workers", type=int, default=None, help="Monte Carlo workers (default: RMTSOURCE_WORKERS or 1)"
        ),
        click.option("--output", "-o", default=None, help="Write the artifact to this file instead of stdout"),
        click.option(
            "--format",
            "format",
            type=click.Choice(["json", "csv"]),
            default=None,
            help="Artifact format (default: csv for softedge, json otherwise)",
        ),
        click.option(
            "--config",
            type=click.Path(dir_okay=False),
            default=None,
            help="Flat 'key = value' file; explicit flags override its values",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _value(flag: str, name: str, help: str = "") -> Callable:
    """A task parameter flag; values are validated by the task model."""
    return click.option(flag, name, default=None, help=help)


# ---------------------------------------------------------------------------
# specfun
# ---------------------------------------------------------------------------


@click.command("specfun")
@click.option(
    "--function",
    type=click.Choice(
        [
            "hermite",
            "laguerre",
            "hyp0f1",
            "airy",
            "incomplete_airy",
            "incomplete_hermite",
            "jack",
            "dprime",
            "pochhammer",
            "hyper_0f0",
            "hyper_0f1",
            "density",
        ]
    ),
    default=None,
    help="Function to evaluate",
)
@click.option("--route", type=click.Choice(["closed", "contour"]), default=None, help="Evaluation route")
@_value("--n", "n", help="Polynomial degree")
@_value("--r", "r", help="Order of the incomplete Airy/Hermite function")
@_value("--a", "a", help="Laguerre parameter")
@_value("--c", "c", help="0F1 parameter or Pochhammer argument")
@_value("--u", "u", help="Argument of the incomplete Hermite function")
@_value("--X", "X", help="Argument of the incomplete Airy function")
@_value("--x", "x", help="Comma-separated argument or first variable set")
@_value("--y", "y", help="Comma-separated second variable set")
@_value("--s", "s", help="Comma-separated sources")
@_value("--mu", "mu", help="Comma-separated sources for the density")
@_value("--kappa", "kappa", help="Comma-separated partition parts")
@_value("--alpha", "alpha", help="Jack parameter")
@_value("--beta", "beta", help="Dyson index")
@_value("--degree", "degree", help="Truncation degree of the Jack series")
@run_options
def specfun_cmd(**flags: Any) -> None:
    """Evaluate a special function or Jack quantity."""
    _run_command("specfun", flags)


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------


@click.command("sample")
@click.option(
    "--ensemble",
    type=click.Choice(["goe", "gue", "beta", "me", "wishart"]),
    default=None,
    help="Ensemble to draw from",
)
@_value("--N", "N", help="Matrix size")
@_value("--beta", "beta", help="Dyson index of the recursive or ME ensemble")
@_value("--s", "s", help="Comma-separated source (length N)")
@_value("--c", "c", help="Weight constant of the ME ensemble")
@_value("--n", "n", help="Wishart column count")
@_value("--p", "p", help="Wishart row count")
@click.option("--field", type=click.Choice(["real", "complex"]), default=None, help="Wishart entries")
@_value("--mu", "mu", help="Comma-separated Wishart source")
@_value("--count", "count", help="Number of samples")
@run_options
def sample_cmd(**flags: Any) -> None:
    """Draw eigenvalue samples."""
    _run_command("sample", flags)


# ---------------------------------------------------------------------------
# charpoly
# ---------------------------------------------------------------------------


@click.command("charpoly")
@click.option("--gauss", is_flag=True, help="Shifted Gaussian ensemble (default)")
@click.option("--chiral", is_flag=True, help="Chiral block matrix with source")
@click.option("--wishart", is_flag=True, help="Wishart matrix with source")
@click.option("--box", is_flag=True, help="Laguerre integral over a box")
@click.option(
    "--method",
    type=click.Choice(["quadrature", "combinatorial", "series", "integral"]),
    default=None,
    help="Evaluation method (default depends on the model)",
)
@_value("--lambda", "lam", help="Evaluation point")
@_value("--N", "N", help="Matrix size")
@_value("--s", "s", help="Comma-separated source")
@_value("--n", "n", help="Chiral column count")
@_value("--p", "p", help="Chiral row count")
@_value("--a", "a", help="Laguerre parameter of the box integral")
@_value("--m", "m", help="Comma-separated box shifts")
@_value("--mu", "mu", help="Comma-separated Wishart source")
@_value("--beta", "beta", help="1 (real) or 2 (complex) for sampling")
@_value("--samples", "samples", help="Monte Carlo samples; 0 skips sampling")
@run_options
def charpoly_cmd(**flags: Any) -> None:
    """Averaged characteristic polynomial, exact and optionally sampled."""
    _run_command("charpoly", flags)


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------


@click.command("duality")
@click.option("--check", type=click.Choice(["w2", "fr", "dr1", "dr2"]), default=None, help="Identity to check")
@_value("--beta", "beta", help="Dyson index")
@_value("--alpha", "alpha", help="Jack parameter of the source duality")
@_value("--N", "N", help="Matrix size")
@_value("--n", "n", help="Number of moments or dual size")
@_value("--p", "p", help="Chiral row count")
@_value("--a", "a", help="Chiral excess parameter")
@_value("--x", "x", help="Comma-separated evaluation points")
@_value("--lambda", "lam", help="Evaluation point of the fr check")
@_value("--xi", "xi", help="Comma-separated dual variables")
@_value("--sigma", "sigma", help="Comma-separated dual source")
@_value("--s", "s", help="Comma-separated chiral source")
@_value("--m", "m", help="Comma-separated chiral evaluation points")
@_value("--samples", "samples", help="Monte Carlo samples per side")
@_value("--threshold", "threshold", help="Pass threshold on the z-score")
@run_options
def duality_cmd(**flags: Any) -> None:
    """Check a duality identity numerically."""
    _run_command("duality", flags)


# ---------------------------------------------------------------------------
# softedge
# ---------------------------------------------------------------------------


@click.command("softedge")
@click.option(
    "--which", type=click.Choice(["classic", "gauss", "chiral", "szego"]), default=None, help="Limit to study"
)
@_value("--sizes", "sizes", help="Comma-separated sizes N (or p)")
@_value("--X", "X", help="Comma-separated scaled points")
@_value("--r", "r", help="Number of scaled sources")
@_value("--s", "s", help="Comma-separated scaled sources")
@_value("--s1", "s1", help="Comma-separated chiral source values")
@_value("--a", "a", help="Laguerre parameter")
@_value("--k", "k", help="Shift of the Laguerre degree")
@run_options
def softedge_cmd(**flags: Any) -> None:
    """Tabulate finite-size values against their soft-edge limits."""
    _run_command("softedge", flags)


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------


@click.command("selftest")
@_value("--modules", "modules", help="Comma-separated module names (default: all)")
@run_options
def selftest_cmd(**flags: Any) -> None:
    """Run the fast invariant checks of every numerical module."""
    _run_command("selftest", flags)
