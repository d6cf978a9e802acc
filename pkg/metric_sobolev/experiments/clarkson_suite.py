"""
Convexity, homogeneity and embedding checks of the discrete Sobolev norm on
seeded random field pairs.
"""

import numpy as np
import pandas as pd

from ..energy import (
    clarkson_residual,
    energy_Fq,
    energy_sup,
    phi_embedding,
    project_cells,
    sobolev_norm_N,
    uniform_convexity_slack,
)
from ..partition import build_partition, neighbor_graph
from ..report import Report, worst_or_zero
from .base import BaseExperiment

INEQUALITY_RTOL = 1e-10
IDENTITY_RTOL = 1e-9
SLACK_TOL = 1e-9
EXACT_RTOL = 1e-12


class ClarksonSuite(BaseExperiment):
    """Clarkson residuals and related norm properties for ``config.pairs`` pairs.

    Fields are standard normal per point; the scale is the first configured
    delta, or a tenth of the diameter.
    """

    experiment_name = "clarkson-suite"

    def execute(self) -> Report:
        space = self.build_space()
        q = self.config.q
        delta = self.config.deltas[0] if self.config.deltas else 0.1 * (space.diameter or 1.0)
        self.status_queue.put(f"Building partition at delta={delta!r}.")
        partition = build_partition(space, delta)
        graph = neighbor_graph(space, partition)
        rng = self.rng

        rows = []
        for pair in self.track_determinate_progress(range(self.config.pairs)):
            u = rng.standard_normal(space.n)
            v = rng.standard_normal(space.n)
            scaling = rng.uniform(-3.0, 3.0)
            residual = clarkson_residual(space, partition, graph, u, v, q)

            projected = project_cells(space, partition, u).values
            cell_norm = float(partition.cell_mass @ np.abs(projected) ** q)
            point_norm = float(space.mass @ np.abs(u) ** q)
            energy = energy_Fq(space, partition, graph, u, q)
            norm = sobolev_norm_N(space, partition, graph, u, q)
            rows.append(
                {
                    "pair": pair,
                    "inequality": residual.inequality,
                    "scale": residual.scale,
                    "identity": residual.identity,
                    "identity_scale": residual.identity_scale,
                    "convexity_slack": uniform_convexity_slack(space, partition, graph, u, v, q),
                    "contraction": cell_norm - point_norm,
                    "contraction_scale": point_norm,
                    "homogeneity": abs(
                        energy_Fq(space, partition, graph, scaling * u, q)
                        - abs(scaling) ** q * energy
                    ),
                    "homogeneity_scale": abs(scaling) ** q * energy,
                    "domination": energy_sup(space, partition, graph, u, q) - energy,
                    "domination_scale": energy,
                    "isometry": abs(
                        np.linalg.norm(phi_embedding(space, partition, graph, u, q), ord=q) - norm
                    ),
                    "isometry_scale": norm,
                }
            )
        table = pd.DataFrame(rows)

        report = Report(name=self.experiment_name)
        report.tables["pairs"] = table
        report.values.update(
            {"q": q, "delta": delta, "n_cells": partition.n_cells, "pairs": len(table)}
        )

        def record_relative(name, values, scale, tol):
            relative = values / scale.where(scale > 0, 1.0)
            report.record(
                name,
                bool((values <= tol * scale).all()),
                worst=worst_or_zero(relative),
                bound=tol,
                detail="largest value relative to its scale",
            )

        inequality = table["inequality"] / table["scale"].where(table["scale"] > 0, 1.0)
        report.record(
            "clarkson_inequality",
            bool((table["inequality"] >= -INEQUALITY_RTOL * table["scale"]).all()),
            worst=worst_or_zero(inequality, reducer=min),
            bound=-INEQUALITY_RTOL,
            detail="smallest slack relative to N^q(u) + N^q(v)",
        )
        if q == 2:
            record_relative(
                "parallelogram_identity",
                table["identity"].abs(),
                table["identity_scale"],
                IDENTITY_RTOL,
            )
        slack = table["convexity_slack"]
        report.record(
            "uniform_convexity",
            bool((slack >= -SLACK_TOL).all()),
            worst=float(slack.min()),
            bound=-SLACK_TOL,
        )
        for name in ("contraction", "homogeneity", "domination", "isometry"):
            record_relative(name, table[name], table[f"{name}_scale"], EXACT_RTOL)
        return report
