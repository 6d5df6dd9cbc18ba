"""Genetic algorithm over schedule genomes.

Tournament selection, two-point crossover, uniform mutation, and elitism.
Each generation draws from one ``numpy.random.Generator`` (PCG64) in a
fixed order: all tournaments, then all crossover decisions and cut
points, then all mutation draws.  A seed therefore reproduces a run
exactly on any platform numpy supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baseline import baseline_genome, baseline_metrics
from .domain import Genome, Problem, decode, random_genomes
from .errors import ConfigError
from .objective import Evaluator
from .results import OptimizationResult


@dataclass(frozen=True)
class GAParams:
    population_size: int = 100
    generations: int = 200
    tournament_size: int = 2
    crossover_prob: float = 0.9
    mutation_prob_per_gene: float | None = None  # None means 1 / genome length
    elite_count: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if not 2 <= self.tournament_size <= self.population_size:
            raise ConfigError("tournament_size must be in [2, population_size]")
        if not 0 <= self.elite_count < self.population_size:
            raise ConfigError("elite_count must be in [0, population_size)")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ConfigError("crossover_prob must be in [0, 1]")
        p = self.mutation_prob_per_gene
        if p is not None and not 0.0 <= p <= 1.0:
            raise ConfigError("mutation_prob_per_gene must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def mutation_rate(self, genome_length: int) -> float:
        if self.mutation_prob_per_gene is not None:
            return self.mutation_prob_per_gene
        return 1.0 / genome_length if genome_length else 0.0


def init_population(
    problem: Problem,
    params: GAParams,
    baseline: Genome,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Baseline genome at index 0, the rest uniform over each gene's range."""
    if rng is None:
        rng = np.random.default_rng(params.seed)
    pop = random_genomes(problem, params.population_size, rng)
    pop[0] = baseline
    return pop


# --- operators (batched; the public single-shot versions wrap these) --------


def _tournament_winners(fitnesses: np.ndarray, size: int, n: int, rng) -> np.ndarray:
    N = len(fitnesses)
    keys = rng.random((n, N))
    entrants = np.argpartition(keys, size - 1, axis=1)[:, :size]
    f = fitnesses[entrants]
    best = f.min(axis=1, keepdims=True)
    return np.where(f == best, entrants, N).min(axis=1)


def tournament_select(population, fitnesses, params: GAParams, rng) -> Genome:
    """Best of ``tournament_size`` distinct uniformly drawn members; ties to the lower index."""
    fitnesses = np.asarray(fitnesses, dtype=float)
    if len(population) != len(fitnesses) or len(fitnesses) < params.tournament_size:
        raise ValueError("population and fitnesses must match and hold a full tournament")
    winner = _tournament_winners(fitnesses, params.tournament_size, 1, rng)[0]
    return np.array(population[winner], copy=True)


def swap_segment(a: Genome, b: Genome, c1: int, c2: int) -> tuple[Genome, Genome]:
    """Exchange genes ``[c1, c2)`` between two parents."""
    a, b = np.array(a, copy=True), np.array(b, copy=True)
    a[c1:c2], b[c1:c2] = b[c1:c2].copy(), a[c1:c2].copy()
    return a, b


def _crossover(A: np.ndarray, B: np.ndarray, prob: float, rng) -> tuple[np.ndarray, np.ndarray]:
    n, L = A.shape
    do = rng.random(n) < prob
    if L == 0:
        return A.copy(), B.copy()
    x = rng.integers(0, L + 1, size=n)
    y = rng.integers(0, L, size=n)
    y = y + (y >= x)
    c1, c2 = np.minimum(x, y), np.maximum(x, y)
    idx = np.arange(L)
    mask = do[:, None] & (idx >= c1[:, None]) & (idx < c2[:, None])
    return np.where(mask, B, A), np.where(mask, A, B)


def two_point_crossover(a: Genome, b: Genome, rng, crossover_prob: float = 1.0) -> tuple[Genome, Genome]:
    """Swap the middle segment between cut points ``0 <= c1 < c2 <= L``.

    With probability ``1 - crossover_prob`` the parents come back as copies.
    """
    A, B = np.atleast_2d(a), np.atleast_2d(b)
    if A.shape != B.shape:
        raise ValueError("parents have different layouts")
    ca, cb = _crossover(A, B, crossover_prob, rng)
    return ca[0], cb[0]


def _mutate(G: np.ndarray, highs: np.ndarray, n_starts: int, p: float, rng) -> np.ndarray:
    hit = rng.random(G.shape) < p
    redraw = rng.integers(0, highs + 1, size=G.shape, dtype=np.int64)
    out = G.copy()
    out[:, n_starts:] ^= hit[:, n_starts:]
    out[:, :n_starts] = np.where(hit[:, :n_starts], redraw[:, :n_starts], G[:, :n_starts])
    return out


def uniform_mutation(g: Genome, problem: Problem, params: GAParams, rng) -> Genome:
    """Flip each bit, and redraw each start gene, with the per-gene mutation rate."""
    layout = problem.layout
    p = params.mutation_rate(layout.length)
    return _mutate(np.atleast_2d(np.asarray(g, dtype=np.int64)), layout.highs, layout.n_starts, p, rng)[0]


# --- driver -----------------------------------------------------------------


def run_ga(problem: Problem, params: GAParams = GAParams()) -> OptimizationResult:
    """Fixed-budget GA; returns the best genome ever evaluated.

    ``history[0]`` is the best fitness of the initial population and
    ``history[k]`` the best of generation ``k``.
    """
    rng = np.random.default_rng(params.seed)
    evaluate = Evaluator(problem, baseline_metrics(problem))
    layout = problem.layout
    mut = params.mutation_rate(layout.length)

    pop = init_population(problem, params, baseline_genome(problem), rng)
    fit = evaluate(pop)
    N, elite = params.population_size, params.elite_count
    n_off = N - elite
    n_pairs = math.ceil(n_off / 2)

    best_i = int(np.argmin(fit))
    best_g, best_f = pop[best_i].copy(), fit[best_i]
    history = [best_f]
    for _ in range(params.generations):
        order = np.argsort(fit, kind="stable")
        elites, elite_fit = pop[order[:elite]], fit[order[:elite]]

        winners = _tournament_winners(fit, params.tournament_size, 2 * n_pairs, rng)
        mothers, fathers = pop[winners[0::2]], pop[winners[1::2]]
        kids_a, kids_b = _crossover(mothers, fathers, params.crossover_prob, rng)
        kids = np.empty((2 * n_pairs, layout.length), dtype=np.int64)
        kids[0::2], kids[1::2] = kids_a, kids_b
        kids = _mutate(kids, layout.highs, layout.n_starts, mut, rng)[:n_off]

        pop = np.concatenate([elites, kids])
        fit = np.concatenate([elite_fit, evaluate(kids)])
        i = int(np.argmin(fit))
        if fit[i] < best_f:
            best_g, best_f = pop[i].copy(), fit[i]
        history.append(fit[i])

    return OptimizationResult(
        algorithm="ga",
        best_genome=best_g,
        best_schedule=decode(best_g, problem),
        metrics=evaluate.metrics(best_g),
        history=np.array(history),
        evaluations=evaluate.calls,
        seed=params.seed,
    )
