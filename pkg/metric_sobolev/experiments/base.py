"""
Module containing abstract base for metric-sobolev experiment classes.
"""

import os
import queue
from abc import ABC, abstractmethod
from collections.abc import Collection, Generator
from typing import Optional, TypeVar

import numpy as np

from .._typing import BallGrid
from ..config import ExperimentConfig
from ..diagnostics import default_ball_grid
from ..fields import build_field
from ..generators import resolve_space
from ..io import load_ball_grid
from ..report import Report
from ..space import FiniteMetricMeasureSpace, ScalarField
from ..utils.saving import emit_report, save_results

T = TypeVar("T")

DEFAULT_DELTA_FRACTIONS = (0.2, 0.1, 0.05, 0.02)


class BaseExperiment(ABC):
    """Generic abstract base for experiment classes.

    Parameters
    ----------
    config : ExperimentConfig

    Attributes
    ----------
    continue_running : bool
        Cleared by ``request_stop``; experiments check it between items.
    num_items : int or None (default=None)
        Length of the collection currently being tracked.
    items_completed : int or None (default=None)
    current_item_ref : str or None (default=None)
        Representation of the item currently being processed.
    status_queue : queue.Queue of str
        FIFO collection of the object's status.
    report : Report or None
        Result of the last run.
    filepaths : list of str
        Files written by the last run.

    See Also
    --------
    queue.Queue : Queue data structure
    """

    experiment_name = "experiment"

    def __init__(self, config: ExperimentConfig) -> None:
        self.config = config
        self.continue_running = True

        self.status_queue = queue.Queue()
        self.num_items = None
        self.items_completed = None
        self.current_item_ref = None

        self.report: Optional[Report] = None
        self.filepaths: list[str] = []
        self._space: Optional[FiniteMetricMeasureSpace] = None

    def track_determinate_progress(
        self, coll: Collection[T]
    ) -> Generator[T, None, None]:
        """Generator for iterating items and updating progress.

        Parameters
        ----------
        coll : iterable

        Yields
        ------
        next object of coll

        Raises
        ------
        TypeError
            coll parameter is not iterable.
        """

        if not hasattr(coll, "__iter__"):
            raise TypeError('Parameter "coll" must be iterable.')

        self.num_items = len(coll)
        self.items_completed = 0

        for item in coll:
            if not self.continue_running:
                self.status_queue.put(f"{self.experiment_name} stopped early.")
                break
            self.current_item_ref = str(item)
            yield item
            self.items_completed += 1

        self.num_items = None
        self.items_completed = None
        self.current_item_ref = None

    @property
    def rng(self) -> np.random.Generator:
        """Fresh generator seeded from the config."""
        return np.random.default_rng(self.config.seed)

    def build_space(self) -> FiniteMetricMeasureSpace:
        """Resolve (and cache) the configured space."""

        if self._space is None:
            self.status_queue.put(f'Building space "{self.config.space}".')
            self._space = resolve_space(self.config.space)
        return self._space

    def build_field(self, spec: Optional[str] = None) -> ScalarField:
        return build_field(self.build_space(), spec or self.config.field, seed=self.config.seed)

    def deltas(self) -> list[float]:
        """Configured scales, or fractions of the diameter."""

        if self.config.deltas:
            return list(self.config.deltas)
        diameter = self.build_space().diameter or 1.0
        return [fraction * diameter for fraction in DEFAULT_DELTA_FRACTIONS]

    def ball_grid(self) -> BallGrid:
        space = self.build_space()
        if self.config.balls:
            return load_ball_grid(space, self.config.balls)
        return default_ball_grid(space)

    def _save_results(self, report: Report) -> list[str]:
        """Helper function for writing the report and reporting status."""

        save_dir = self.config.out
        self.status_queue.put(f'Saving output to "{save_dir}".')
        stem = os.path.join(save_dir, self.experiment_name)
        if self.config.output_format == "json":
            filepaths = [emit_report(report, f"{stem}.json", "json")]
        else:
            tables = {
                f"{self.experiment_name}_{key}": table for key, table in report.tables.items()
            }
            tables[f"{self.experiment_name}_checks"] = Report.to_frame(report)
            filepaths = save_results(tables, data_dir=save_dir, output_format="csv")
        self.status_queue.put("Save complete.")
        return filepaths

    @abstractmethod
    def execute(self) -> Report:
        """Abstract placeholder for the experiment itself."""
        raise NotImplementedError('Subclass must override "execute()".')

    def run(self) -> Report:
        """Execute the experiment and write its report."""

        self.status_queue.put(f"Running {self.experiment_name}...")
        report = self.execute()
        for message in report.warnings:
            self.status_queue.put(f"Warning: {message}")
        report.values.setdefault("seed", self.config.seed)
        report.values.setdefault("space", self.config.space)
        self.filepaths = self._save_results(report)
        self.report = report
        self.status_queue.put(f"{self.experiment_name} run complete.")
        return report

    def request_stop(self) -> None:
        """Raise flag to stop iterating."""
        self.continue_running = False
