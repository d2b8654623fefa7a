"""
Command line integration.
"""
import logging
from dataclasses import replace
from enum import Enum, unique
from pathlib import Path
from typing import List, Optional

import typer

from groupoid_cocycles import document, generators, suite
from groupoid_cocycles.logger import setup_module_logging
from groupoid_cocycles.utils import (
    ConstructionError,
    DocumentError,
    GroupoidFormatError,
    UsageError,
    VerifyConfig,
    check_seed,
    read_config,
)

APP = typer.Typer()

CONFIG = "gpd.ini"

INPUT_ERRORS = (DocumentError, UsageError, GroupoidFormatError, ConstructionError)


@unique
class LoggingLevel(Enum):

    """
    Enums for logging levels.
    """

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


@unique
class OutputFormat(Enum):

    """
    Report formats.
    """

    JSON = "json"
    TEXT = "text"


@unique
class Weights(Enum):

    """
    Haar systems of generated instances.
    """

    COUNTING = generators.WeightsChoice.COUNTING
    RANDOM = generators.WeightsChoice.RANDOM


def _setup_logging(logging_level: LoggingLevel):
    """
    Set up logging from command-line options.
    """
    logging_level_int = getattr(logging, logging_level.value, None)
    if not isinstance(logging_level_int, int):
        raise TypeError(
            "Expected logging_level to be an attribute of logging."
            f" Got: {logging_level}."
        )
    setup_module_logging(logging_level_int=logging_level_int)


@APP.callback()
def setup_logging(
    logging_level: LoggingLevel = typer.Option(LoggingLevel.WARNING.value),
):
    """
    Verify GNS constructions, correspondences and Dirichlet forms on finite
    groupoids.
    """
    _setup_logging(logging_level=logging_level)


def _input_error(exc: Exception) -> typer.Exit:
    """
    Report an input error and return the exit to raise.
    """
    logging.error(
        "Invalid input.", extra=dict(error=str(exc), error_type=type(exc).__name__)
    )
    typer.secho(str(exc), fg=typer.colors.RED, err=True)
    return typer.Exit(code=suite.EXIT_INPUT_ERROR)


def _resolve_config(
    config_path: Optional[Path], tol: Optional[float], seed: Optional[int]
) -> VerifyConfig:
    """
    Read config and apply command-line overrides.
    """
    config = read_config(config_path)
    if tol is not None:
        if not tol > 0:
            raise UsageError(f"Expected positive tolerance. Got: {tol}.")
        config = replace(config, tol=tol)
    if seed is not None:
        try:
            config = replace(config, seed=check_seed(seed))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return config


def load_documents(
    target: str, seed: int, instances: int = 1
) -> List[document.InstanceDocument]:
    """
    Read an instance file or generate instances from ``kind:size``.

    Generated instance ``i`` uses seed ``seed + i``.
    """
    if instances < 1:
        raise UsageError(f"Expected at least one instance. Got: {instances}.")
    path = Path(target)
    if path.is_file():
        if instances > 1:
            raise UsageError("Expected a generator spec with --instances above one.")
        return [document.read_document(path)]
    if generators.SPEC_PATTERN.match(target.strip()) is None:
        raise UsageError(f"Expected an instance file or kind:size. Got: {target}.")
    spec = generators.parse_generator_spec(target)
    return [
        generators.generate_random(spec.kind, spec.size, seed=check_seed(seed + index))
        for index in range(instances)
    ]


def _run(
    command: str,
    target: str,
    tol: Optional[float],
    seed: Optional[int],
    output: OutputFormat,
    instances: int,
    config_path: Optional[Path],
    pt_function: str,
    cnt_function: str,
):
    """
    Run a suite command and exit with the report status.
    """
    try:
        config = _resolve_config(config_path, tol=tol, seed=seed)
        documents = load_documents(target, seed=config.seed, instances=instances)
        report = suite.run_suite(
            command,
            documents,
            config=config,
            pt_function=pt_function,
            cnt_function=cnt_function,
        )
    except INPUT_ERRORS as exc:
        raise _input_error(exc) from exc
    if output == OutputFormat.TEXT:
        typer.echo(report.to_text())
    else:
        typer.echo(report.to_json())
    raise typer.Exit(code=report.exit_code)


TARGET = typer.Argument(..., help="Instance JSON file or generator spec kind:size.")
TOL = typer.Option(None, help="Absolute residual tolerance.")
SEED = typer.Option(None, help="Seed of sampled elements and generated instances.")
OUTPUT = typer.Option(OutputFormat.JSON.value, help="Report format.")
INSTANCES = typer.Option(1, help="Number of generated instances.")
CONFIG_PATH = typer.Option(CONFIG, "--config", help="Verification ini file.")
PT_FUNCTION = typer.Option(
    generators.PT_FUNCTION, help="Function block tested for positive type."
)
CNT_FUNCTION = typer.Option(
    generators.CNT_FUNCTION,
    help="Function block tested for conditionally negative type.",
)


def _register(command: str, help_text: str):
    """
    Register a suite command with the shared options.
    """

    def run_command(
        target: str = TARGET,
        tol: Optional[float] = TOL,
        seed: Optional[int] = SEED,
        output: OutputFormat = OUTPUT,
        instances: int = INSTANCES,
        config_path: Path = CONFIG_PATH,
        pt_function: str = PT_FUNCTION,
        cnt_function: str = CNT_FUNCTION,
    ):
        _run(
            command,
            target=target,
            tol=tol,
            seed=seed,
            output=output,
            instances=instances,
            config_path=config_path,
            pt_function=pt_function,
            cnt_function=cnt_function,
        )

    run_command.__doc__ = help_text
    APP.command(name=command)(run_command)


_register(suite.Command.VALIDATE, "Validate groupoid, Haar system and bundles.")
_register(suite.Command.CHECK_PT, "Test a function for positive type.")
_register(suite.Command.CHECK_CNT, "Test a function for conditionally negative type.")
_register(suite.Command.GNS_PT, "Build and check the GNS bundle of a function.")
_register(suite.Command.GNS_CNT, "Build and check the GNS cocycle of a function.")
_register(suite.Command.SCHOENBERG, "Check both directions of Schoenberg.")
_register(suite.Command.NORM, "Check the regular representation and its norm.")
_register(suite.Command.CORRESPONDENCE, "Check the correspondence axioms.")
_register(suite.Command.FUNCTOR, "Check composition and pushforward.")
_register(suite.Command.SAUVAGEOT, "Check the Dirichlet form and its derivation.")
_register(suite.Command.ALL, "Run every verification command.")


@APP.command()
def generate(
    spec: str = typer.Argument(..., help="Generator spec kind:size."),
    seed: int = typer.Option(0, help="Seed of the instance."),
    weights: Weights = typer.Option(Weights.COUNTING.value, help="Haar system."),
    max_dim: int = typer.Option(3, help="Largest fiber dimension."),
):
    """
    Write a generated instance document to stdout.
    """
    try:
        parsed = generators.parse_generator_spec(spec)
        try:
            seed = check_seed(seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        generated = generators.generate_random(
            parsed.kind,
            parsed.size,
            seed=seed,
            weights=weights.value,
            max_dim=max_dim,
        )
    except INPUT_ERRORS as exc:
        raise _input_error(exc) from exc
    typer.echo(document.serialize(generated), nl=False)
