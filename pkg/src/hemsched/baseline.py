"""The unscheduled ("without HEMS") reference household."""

from __future__ import annotations

import numpy as np

from .domain import FlexClass, Genome, Problem, Schedule, encode
from .errors import ConfigError
from .objective import Metrics, self_normalised_metrics


def baseline_schedule(problem: Problem) -> Schedule:
    """Every appliance runs one contiguous block from its baseline start.

    Fixed appliances use their fixed window, which defaults to the
    baseline start, so fixed rows are identical with and without HEMS.
    """
    T = problem.grid.slot_count
    states = np.zeros((len(problem.appliances), T), dtype=np.uint8)
    for i, a in enumerate(problem.appliances):
        start = a.fixed_start if a.flex_class is FlexClass.FIXED else a.baseline_start_slot
        req = int(problem.required[i])
        if not 0 <= start <= T - req:
            raise ConfigError(
                f"{a.name}: baseline run of {req} slots from slot {start} overflows the {T}-slot horizon"
            )
        states[i, start : start + req] = 1
    return Schedule(states)


def baseline_genome(problem: Problem) -> Genome:
    return encode(baseline_schedule(problem), problem)


def baseline_metrics(problem: Problem) -> Metrics:
    """Baseline metrics; its fitness is ``w_cost + w_par + penalty``."""
    return self_normalised_metrics(baseline_schedule(problem), problem)
