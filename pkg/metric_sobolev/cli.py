"""
CLI for running metric-sobolev experiments.

Exit status: 0 when every hard check passes, 1 when a check fails, 2 on
configuration, parse or parameter errors and 3 when a computation cannot
finish (solver divergence, mismatched inputs).
"""

import argparse
import queue
import sys
import warnings
from collections.abc import Sequence
from typing import Optional, TextIO

from .config import ExperimentConfig
from .exceptions import (
    ConfigurationError,
    InvalidParameterError,
    MetricSobolevError,
    SpaceFormatError,
)
from .experiments import available_experiments
from .experiments.base import BaseExperiment
from .experiments.manifest import load_manifest, run_manifest

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUN_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metric-sobolev",
        description="Run Sobolev calculus experiments on finite metric measure spaces.",
    )
    parser.add_argument("--experiment", choices=list(available_experiments))
    parser.add_argument("--space", help="generator spec, e.g. 'interval(2000)', or a space file")
    parser.add_argument("--field", default="sin")
    parser.add_argument("--q", type=float, default=2.0)
    parser.add_argument("--p", type=float, default=2.0)
    parser.add_argument("--deltas", default="", help="comma-separated scales")
    parser.add_argument("--times", default="", help="comma-separated increasing times")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="results")
    parser.add_argument("--format", dest="output_format", choices=["json", "csv"], default="json")
    parser.add_argument("--tau", type=float, default=0.01)
    parser.add_argument("--steps", type=int, default=10)
    parser.add_argument("--curves")
    parser.add_argument("--balls")
    parser.add_argument("--pairs", type=int, default=100)
    parser.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    parser.add_argument("--radius", type=float)
    parser.add_argument("--manifest", help="JSON list of configs to run instead of the flags")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Turn parsed flags into a validated config."""

    if args.experiment is None or args.space is None:
        raise ConfigurationError("--experiment and --space are required without --manifest.")
    options = vars(args).copy()
    options.pop("manifest")
    return ExperimentConfig(**options)


def drain_status(experiment: BaseExperiment, stream: TextIO) -> None:
    """Write every queued status message of an experiment to stream."""

    while True:
        try:
            message = experiment.status_queue.get_nowait()
        except queue.Empty:
            break
        stream.write(f"[{experiment.experiment_name}] {message}\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one experiment (or a manifest) and return the exit status."""

    args = build_parser().parse_args(argv)
    try:
        if args.manifest:
            configs = load_manifest(args.manifest)
        else:
            configs = [config_from_args(args)]
        experiments = []
        for config in configs:
            try:
                experiment_class = available_experiments[config.experiment]
            except KeyError as unknown:
                raise ConfigurationError(
                    f"experiment must be one of {list(available_experiments)}, "
                    f"not '{config.experiment}'."
                ) from unknown
            experiments.append(experiment_class(config))
        try:
            # report warnings reach stderr through the status queues
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                run_manifest(experiments)
        finally:
            for experiment in experiments:
                drain_status(experiment, sys.stderr)
    except (ConfigurationError, SpaceFormatError, InvalidParameterError) as error:
        sys.stderr.write(f"metric-sobolev: error: {error}\n")
        return EXIT_CONFIG_ERROR
    except MetricSobolevError as error:
        sys.stderr.write(f"metric-sobolev: {type(error).__name__}: {error}\n")
        return EXIT_RUN_ERROR

    failures = [
        f"{experiment.experiment_name}: {check.name}"
        for experiment in experiments
        for check in experiment.report.failures()
    ]
    for failure in failures:
        sys.stderr.write(f"FAILED {failure}\n")
    return EXIT_CHECK_FAILED if failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
