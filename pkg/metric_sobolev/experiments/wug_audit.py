"""
Discrete weak upper gradient audit along curve families.
"""

from ..io import load_curves
from ..partition import build_partition, neighbor_graph
from ..report import Report
from ..slopes import (
    center_random_walks,
    discrete_wug_check,
    geodesic_paths,
    monotone_paths,
)
from .base import BaseExperiment

WALK_STEPS = 8


class WugAudit(BaseExperiment):
    """Check 4 |D_delta u| as an upper gradient along curves at every scale.

    Curves come from ``config.curves`` when given. Otherwise interval and
    grid spaces use random monotone paths, graph spaces use geodesics
    between random point pairs, and every space gets random walks through
    the cell centers.
    """

    experiment_name = "wug-audit"

    def _point_curves(self, space):
        if self.config.curves:
            return load_curves(space, self.config.curves)
        if space.name.startswith(("interval", "grid2d")):
            return monotone_paths(space, self.config.pairs, seed=self.config.seed)
        if space.metric == "graph" and space.edges:
            rng = self.rng
            pairs = [
                tuple(int(i) for i in rng.choice(space.n, size=2, replace=False))
                for _ in range(self.config.pairs)
            ]
            return geodesic_paths(space, pairs)
        return []

    def execute(self) -> Report:
        space = self.build_space()
        u = self.build_field()
        q = self.config.q
        curves = self._point_curves(space)
        report = Report(name=self.experiment_name)
        report.values["point_curves"] = len(curves)

        for delta in self.track_determinate_progress(self.deltas()):
            self.status_queue.put(f"Checking curves at delta={delta!r}.")
            partition = build_partition(space, delta)
            graph = neighbor_graph(space, partition)
            walks = center_random_walks(
                space, partition, graph, self.config.pairs, WALK_STEPS, seed=self.config.seed
            )
            if curves:
                check = discrete_wug_check(space, partition, graph, u, curves, q=q)
                report.merge(check, prefix=f"delta={delta!r}.paths")
            if walks:
                check = discrete_wug_check(space, partition, graph, u, walks, q=q)
                report.merge(check, prefix=f"delta={delta!r}.walks")
        return report
