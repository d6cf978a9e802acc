"""
Hopf-Lax semigroup laws on a time grid.
"""

from ..hopf_lax import (
    check_monotonicity,
    check_semicontinuity,
    check_slope_bound,
    check_subsolution,
    check_time_derivative,
    lipschitz_bound_check,
)
from ..report import Report
from .base import BaseExperiment

DEFAULT_TIMES = tuple(k / 10 for k in range(1, 11))
DERIVATIVE_STEP = 1e-4
SEMICONTINUITY_STEP = 1e-9


class HopfLaxSuite(BaseExperiment):
    """Semigroup laws of Q_t f on a time grid.

    Monotonicity and the Lipschitz bounds use the whole grid. The
    derivative, semicontinuity, slope and subsolution checks run at the
    middle time. The subsolution residual uses a finite radius and is kept
    as information only.
    """

    experiment_name = "hopflax-suite"

    def execute(self) -> Report:
        space = self.build_space()
        f = self.build_field()
        p = self.config.p
        times = list(self.config.times or DEFAULT_TIMES)
        middle = times[len(times) // 2]
        h = min(DERIVATIVE_STEP, middle / 2)
        radius = self.config.radius or 3 * space.min_positive_distance

        report = Report(name=self.experiment_name)
        report.values.update({"p": p, "times": times, "middle_time": middle, "h": h, "r": radius})
        steps = {
            "monotonicity": lambda: check_monotonicity(space, f, p, times),
            "time_derivative": lambda: check_time_derivative(space, f, p, middle, h),
            "semicontinuity": lambda: check_semicontinuity(
                space, f, p, middle, min(SEMICONTINUITY_STEP, middle / 2)
            ),
            "lipschitz": lambda: lipschitz_bound_check(space, f, p, times),
            "slope_bound": lambda: check_slope_bound(space, f, p, middle, radius),
        }
        for name in self.track_determinate_progress(list(steps)):
            self.status_queue.put(f"Checking {name}.")
            report.merge(steps[name](), prefix=name)

        subsolution = check_subsolution(space, f, p, middle, h, radius)
        report.merge(subsolution, prefix="subsolution", include_checks=False)
        return report
