"""
Run experiment configs from a manifest, several at a time.
"""

import json
import os
import threading
from collections.abc import Sequence
from typing import Any, Optional, Union

from ..config import ExperimentConfig, max_threads
from ..exceptions import ConfigurationError
from .base import BaseExperiment


class ThreadedRun(threading.Thread):
    """Wrapper for a concrete experiment object to allow threading.

    Parameters
    ----------
    experiment : Subclass of BaseExperiment
    **kwargs : dict, optional
        Additional parameters for threading.Thread.

    Attributes
    ----------
    error : Exception or None
        Exception raised by the experiment run, if any.
    """

    def __init__(self, experiment: BaseExperiment, **kwargs: Any) -> None:
        self.experiment = experiment
        self.error = None
        super().__init__(target=self._run_experiment, **kwargs)

    def _run_experiment(self) -> None:
        try:
            self.experiment.run()
        except Exception as error:  # surfaced by run_manifest
            self.error = error


def load_manifest(path: Union[str, os.PathLike[str]]) -> list[ExperimentConfig]:
    """Read a JSON list of config objects.

    Raises
    ------
    ConfigurationError
        Missing or malformed manifest, or an invalid entry.
    """

    try:
        with open(path, encoding="utf-8") as manifest_file:
            entries = json.load(manifest_file)
    except (OSError, json.JSONDecodeError) as bad_manifest:
        raise ConfigurationError(f"Cannot read manifest '{path}': {bad_manifest}") from bad_manifest
    if not isinstance(entries, list) or not all(isinstance(entry, dict) for entry in entries):
        raise ConfigurationError(f"Manifest '{path}' must be a JSON list of objects.")
    return [ExperimentConfig.from_dict(entry) for entry in entries]


def run_manifest(
    experiments: Sequence[BaseExperiment], threads: Optional[int] = None
) -> list[BaseExperiment]:
    """Run experiments in batches of at most ``threads`` concurrent threads.

    The first exception raised by any experiment is re-raised once its
    batch has finished.
    """

    threads = max_threads() if threads is None else max(int(threads), 1)
    experiments = list(experiments)
    for start in range(0, len(experiments), threads):
        batch = [
            ThreadedRun(experiment, daemon=True)
            for experiment in experiments[start : start + threads]
        ]
        for run in batch:
            run.start()
        for run in batch:
            run.join()
        for run in batch:
            if run.error is not None:
                raise run.error
    return experiments
