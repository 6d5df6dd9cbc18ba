"""Energy profile, ToU cost, peak-to-average ratio, penalties, and fitness.

Every scalar function here is the ``N = 1`` case of a batch kernel, so a
schedule scored one at a time and the same schedule scored inside a
population produce bit-identical numbers.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .domain import Genome, Problem, Schedule, TimeGrid, _check_shape, check_genomes, decode_batch
from .errors import ConfigError, UndefinedPARError
from .tariff import TariffProfile


@dataclass(frozen=True)
class Metrics:
    total_cost_cents: float
    par: float
    peak_kwh: float
    avg_kwh: float
    penalty: float
    fitness: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> Metrics:
        return cls(**{k: float(v) for k, v in d.items()})


# --- batch kernels ----------------------------------------------------------


def energy_batch(states: np.ndarray, slot_energy: np.ndarray) -> np.ndarray:
    """``(N, A, T)`` states to ``(N, T)`` kWh, summed in appliance order."""
    energy = np.zeros((states.shape[0], states.shape[2]))
    for a in range(states.shape[1]):
        energy += states[:, a, :] * slot_energy[a]
    return energy


def cost_batch(energy: np.ndarray, prices: np.ndarray) -> np.ndarray:
    return (energy * prices).sum(axis=-1)


def par_batch(energy: np.ndarray) -> np.ndarray:
    total = energy.sum(axis=-1)
    if np.any(total <= 0):
        raise UndefinedPARError("PAR is undefined for an all-zero energy profile")
    return energy.shape[-1] * energy.max(axis=-1) / total


def penalty_batch(states: np.ndarray, energy: np.ndarray, problem: Problem) -> np.ndarray:
    T = states.shape[2]
    violations = np.zeros(states.shape[0])
    for p, s in problem.precedence_pairs:
        pred, succ = states[:, p, :], states[:, s, :]
        last_pred = T - 1 - np.argmax(pred[:, ::-1], axis=1)
        first_succ = np.argmax(succ, axis=1)
        present = pred.any(axis=1) & succ.any(axis=1)
        violations += present & (last_pred >= first_succ)
    cap = problem.grid_capacity_kwh
    excess = np.maximum(energy - cap, 0.0).sum(axis=-1) / cap
    return problem.precedence_penalty * violations + problem.capacity_penalty * excess


def _combine(cost, par, penalty, problem: Problem, baseline: Metrics):
    return problem.w_cost * (cost / baseline.total_cost_cents) + problem.w_par * (par / baseline.par) + penalty


# --- scalar API -------------------------------------------------------------


def energy_profile(schedule: Schedule, problem: Problem) -> np.ndarray:
    _check_shape(schedule, problem)
    return energy_batch(schedule.states[None], problem.slot_energy)[0]


def total_cost(profile: np.ndarray, tariff: TariffProfile, grid: TimeGrid) -> float:
    """Sum over slots of energy times price, in cents."""
    profile = np.asarray(profile, dtype=float)
    prices = tariff.slot_prices(grid)
    if profile.shape != prices.shape:
        raise ValueError(f"profile has {profile.shape} slots but the grid has {prices.shape}")
    return float(cost_batch(profile[None], prices)[0])


def par(profile: np.ndarray) -> float:
    profile = np.asarray(profile, dtype=float)
    return float(par_batch(profile[None])[0])


def penalty(schedule: Schedule, problem: Problem) -> float:
    states = schedule.states[None]
    energy = energy_batch(states, problem.slot_energy)
    return float(penalty_batch(states, energy, problem)[0])


def raw_metrics(schedule: Schedule, problem: Problem) -> tuple[float, float, float, float, float]:
    """``(cost, par, peak, avg, penalty)`` without normalisation."""
    _check_shape(schedule, problem)
    states = schedule.states[None]
    energy = energy_batch(states, problem.slot_energy)
    cost = cost_batch(energy, problem.prices)[0]
    ratio = par_batch(energy)[0]
    pen = penalty_batch(states, energy, problem)[0]
    return float(cost), float(ratio), float(energy.max()), float(energy.mean()), float(pen)


def fitness(schedule: Schedule, problem: Problem, baseline: Metrics) -> Metrics:
    if not (baseline.total_cost_cents > 0 and baseline.par > 0):
        raise ConfigError("baseline cost and PAR must be positive to normalise fitness")
    cost, ratio, peak, avg, pen = raw_metrics(schedule, problem)
    fit = _combine(np.array([cost]), np.array([ratio]), np.array([pen]), problem, baseline)[0]
    return Metrics(cost, ratio, peak, avg, pen, float(fit))


def self_normalised_metrics(schedule: Schedule, problem: Problem) -> Metrics:
    """Metrics of ``schedule`` normalised against itself (baseline use)."""
    cost, ratio, peak, avg, pen = raw_metrics(schedule, problem)
    if cost <= 0:
        raise ConfigError("baseline cost is zero; fitness cannot be normalised")
    anchor = Metrics(cost, ratio, peak, avg, pen, 0.0)
    return fitness(schedule, problem, anchor)


class Evaluator:
    """Scores genomes of one problem against fixed baseline metrics.

    Counts every genome it is asked to score in :attr:`calls`.
    """

    def __init__(self, problem: Problem, baseline: Metrics):
        if not (baseline.total_cost_cents > 0 and baseline.par > 0):
            raise ConfigError("baseline cost and PAR must be positive to normalise fitness")
        self.problem = problem
        self.baseline = baseline
        self.calls = 0

    def __call__(self, genomes: np.ndarray, *, checked: bool = True) -> np.ndarray:
        genomes = np.atleast_2d(genomes)
        if not checked:
            genomes = check_genomes(genomes, self.problem)
        p = self.problem
        states = decode_batch(genomes, p, checked=True)
        energy = energy_batch(states, p.slot_energy)
        cost = cost_batch(energy, p.prices)
        ratio = par_batch(energy)
        pen = penalty_batch(states, energy, p)
        self.calls += len(genomes)
        return _combine(cost, ratio, pen, p, self.baseline)

    def metrics(self, genome: Genome) -> Metrics:
        from .domain import decode

        return fitness(decode(genome, self.problem), self.problem, self.baseline)
