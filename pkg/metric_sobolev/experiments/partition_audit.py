"""
Partition and neighbor-graph audit over a ladder of scales.
"""

from ..diagnostics import doubling_constants
from ..partition import build_partition, neighbor_graph, partition_diagnostics
from ..report import Report
from .base import BaseExperiment


class PartitionAudit(BaseExperiment):
    """Build the delta-partition at every configured scale and audit it.

    The doubling constants are measured once and shared by every scale.
    """

    experiment_name = "partition-audit"

    def execute(self) -> Report:
        space = self.build_space()
        doubling = doubling_constants(space, self.ball_grid())
        report = Report(name=self.experiment_name)
        report.merge(doubling, prefix="doubling")

        for delta in self.track_determinate_progress(self.deltas()):
            self.status_queue.put(f"Building partition at delta={delta!r}.")
            partition = build_partition(space, delta)
            graph = neighbor_graph(space, partition)
            audit = partition_diagnostics(space, partition, graph, doubling=doubling)
            report.merge(audit, prefix=f"delta={delta!r}")
        return report
