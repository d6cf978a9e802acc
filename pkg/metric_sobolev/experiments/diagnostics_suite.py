"""
Doubling constants, maximal functions, Lebesgue profiles and Poincare
balls for one field.
"""

import numpy as np

from ..diagnostics import (
    LebesgueSet,
    doubling_constants,
    lebesgue_profile,
    lebesgue_set_profile,
    mass_scaling_slope,
    maximal_function,
    poincare_check,
    radius_ladder,
    telescoping_check,
)
from ..report import Report
from ..slopes import slope_estimate
from ..space import ball_members
from .base import BaseExperiment

MONOTONE_RTOL = 1e-12
MAXIMAL_SCALES = 4
LEBESGUE_SET_TAU = 0.5


class DiagnosticsSuite(BaseExperiment):
    """Run the analysis diagnostics on the configured space and field.

    The gradient surrogate g is the slope estimate of the field at radius
    ``config.radius`` (three times the sample resolution by default).
    """

    experiment_name = "diagnostics-suite"

    def execute(self) -> Report:
        space = self.build_space()
        u = self.build_field()
        q = self.config.q
        lambda_ = self.config.lambda_
        report = Report(name=self.experiment_name)

        self.status_queue.put("Measuring doubling constants.")
        doubling = doubling_constants(space, self.ball_grid())
        doubling.values["mass_scaling_slope"] = mass_scaling_slope(space)
        report.merge(doubling, prefix="doubling")

        self.status_queue.put("Checking maximal function monotonicity.")
        self._maximal_monotonicity(report, space, u, q)

        # Point halfway across the space as seen from the first point.
        center = int(np.argmin(np.abs(space.distance_row(0) - space.diameter / 2)))
        radii = radius_ladder(space)
        profile = lebesgue_profile(space, u, q, center, radii)
        report.values.update(
            {
                "lebesgue.point": space.ids[center],
                "lebesgue.radii": radii,
                "lebesgue.profile": profile,
            }
        )
        sets = self._lebesgue_sets(space, center, radii)
        lebesgue = lebesgue_set_profile(space, u, q, center, sets, doubling=doubling)
        report.merge(lebesgue, prefix="lebesgue_sets")

        radius = self.config.radius or 3 * space.min_positive_distance
        g = slope_estimate(space, u, radius)
        report.values.update({"slope_radius": radius, "slope_empty_balls": g.empty_ball_count})

        self.status_queue.put("Running Poincare checks.")
        poincare = poincare_check(space, u, g.values, q, lambda_, self.ball_grid())
        report.merge(poincare, prefix="poincare")

        rng = self.rng
        pairs = []
        for _ in range(self.config.pairs if space.n > 1 else 0):
            x, y = (int(i) for i in rng.choice(space.n, size=2, replace=False))
            if space.distance(x, y) > 0:
                pairs.append((x, y))
        telescoping = telescoping_check(
            space,
            u,
            g.values,
            q,
            lambda_,
            pairs,
            alpha=doubling.alpha,
            beta=doubling.beta,
            tau=poincare.tau_global,
        )
        report.merge(telescoping, prefix="telescoping")
        return report

    def _lebesgue_sets(self, space, x: int, radii: list[float]) -> list[LebesgueSet]:
        """Balls B(y, tau r) around an off-center y, well inside B(x, r)."""

        row = space.distance_row(x)
        sets = []
        for r in radii:
            near = np.flatnonzero(row <= (1 - LEBESGUE_SET_TAU) * r / 2)
            y = int(near[np.argmax(row[near])])
            members = ball_members(space, y, LEBESGUE_SET_TAU * r)
            if space.mass[members].sum() > 0:
                sets.append(
                    LebesgueSet(
                        center=y,
                        tau=LEBESGUE_SET_TAU,
                        radius=r,
                        members=tuple(int(i) for i in members),
                    )
                )
        return sets

    def _maximal_monotonicity(self, report: Report, space, u, q: float) -> None:
        scales = sorted(radius_ladder(space)[:MAXIMAL_SCALES])
        by_scale = [maximal_function(space, u, q, eps).values for eps in scales]
        eps_drop = max(
            (float(np.max(smaller - larger)) for smaller, larger in zip(by_scale, by_scale[1:])),
            default=0.0,
        )
        report.record(
            "maximal_monotone_in_eps",
            eps_drop <= 0,
            worst=eps_drop,
            bound=0.0,
            detail="largest decrease of M_eps f when eps grows",
        )

        eps = scales[-1]
        lower = maximal_function(space, u, q, eps).values
        higher = maximal_function(space, u, q + 1, eps).values
        q_drop = float(np.max(lower - higher - MONOTONE_RTOL * np.maximum(higher, 1.0)))
        report.record(
            "maximal_monotone_in_q",
            q_drop <= 0,
            worst=q_drop,
            bound=0.0,
            detail="largest decrease of M_eps f when q grows",
        )
        report.values["maximal_scales"] = scales
