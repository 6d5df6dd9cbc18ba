"""Result record returned by every optimizer (GA, HSA, brute force)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Schedule
from .objective import Metrics


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    algorithm: str
    best_genome: np.ndarray
    best_schedule: Schedule
    metrics: Metrics
    history: np.ndarray
    evaluations: int
    seed: int

    def __eq__(self, other):
        if not isinstance(other, OptimizationResult):
            return NotImplemented
        return (
            self.algorithm == other.algorithm
            and np.array_equal(self.best_genome, other.best_genome)
            and self.best_schedule == other.best_schedule
            and self.metrics == other.metrics
            and np.array_equal(self.history, other.history)
            and self.evaluations == other.evaluations
            and self.seed == other.seed
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "evaluations": self.evaluations,
            "metrics": self.metrics.to_dict(),
            "best_genome": self.best_genome.tolist(),
            "best_schedule": ["".join(map(str, row)) for row in self.best_schedule.states.tolist()],
            "history": self.history.tolist(),
        }

    @classmethod
    def from_dict(cls, d) -> OptimizationResult:
        states = np.array([[int(c) for c in row] for row in d["best_schedule"]], dtype=np.uint8)
        return cls(
            algorithm=d["algorithm"],
            best_genome=np.array(d["best_genome"], dtype=np.int64),
            best_schedule=Schedule(states),
            metrics=Metrics.from_dict(d["metrics"]),
            history=np.array(d["history"], dtype=float),
            evaluations=int(d["evaluations"]),
            seed=int(d["seed"]),
        )
