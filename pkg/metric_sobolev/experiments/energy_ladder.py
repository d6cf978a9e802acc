"""
Energy ladders F_delta(u) for decreasing delta, with the sandwich verdict.
"""

from ..diagnostics import doubling_constants
from ..energy import EnergyLadder, energy_ladder, lipschitz_energy_bound
from ..fields import UNIT_DOMAINS, reference_energy
from ..partition import build_partition, neighbor_graph
from .base import BaseExperiment


class EnergyLadderExperiment(BaseExperiment):
    """Sum- and sup-variant ladders plus the cellwise Lipschitz bound.

    The analytic reference energy is only used on the unit interval and
    square, where the named fields have a known Cheeger energy.
    """

    experiment_name = "energy-ladder"

    def execute(self) -> EnergyLadder:
        space = self.build_space()
        u = self.build_field()
        q = self.config.q
        deltas = self.deltas()

        reference = None
        if space.name.startswith(UNIT_DOMAINS):
            reference = reference_energy(self.config.field, q)
        self.status_queue.put("Measuring doubling constants.")
        doubling = doubling_constants(space, self.ball_grid())

        self.status_queue.put(f"Computing energy ladder over {len(deltas)} scales.")
        ladder = energy_ladder(
            space, u, q, deltas, reference_energy=reference, doubling=doubling
        )
        ladder.name = self.experiment_name
        sup_ladder = energy_ladder(space, u, q, deltas, reference_energy=reference, variant="sup")
        ladder.merge(sup_ladder, prefix="sup")

        for delta in self.track_determinate_progress(ladder.deltas):
            partition = build_partition(space, delta)
            graph = neighbor_graph(space, partition)
            bound = lipschitz_energy_bound(space, partition, graph, u, q, doubling=doubling)
            ladder.merge(bound, prefix=f"lipschitz.delta={delta!r}")
        return ladder
