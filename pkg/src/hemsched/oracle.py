"""Exhaustive search for tiny problems; ground truth for heuristic tests."""

from __future__ import annotations

import math

import numpy as np

from .baseline import baseline_metrics
from .domain import Problem, decode
from .errors import SearchSpaceTooLarge
from .objective import Evaluator
from .results import OptimizationResult

SPACE_LIMIT = 2**24
_CHUNK = 1 << 14


def space_size(problem: Problem) -> int:
    return math.prod(int(h) + 1 for h in problem.layout.highs)


def enumerate_genomes(problem: Problem, start: int, stop: int) -> np.ndarray:
    """Genomes ``start..stop-1`` in lexicographic order (gene 0 most significant)."""
    radices = tuple(int(h) + 1 for h in problem.layout.highs)
    if not radices:
        return np.zeros((stop - start, 0), dtype=np.int64)
    digits = np.unravel_index(np.arange(start, stop), radices)
    return np.stack(digits, axis=1).astype(np.int64)


def brute_force(problem: Problem, limit: int = SPACE_LIMIT) -> OptimizationResult:
    """Global minimum of the fitness; ties go to the lexicographically smallest genome."""
    size = space_size(problem)
    if size > limit:
        raise SearchSpaceTooLarge(size, limit)
    evaluate = Evaluator(problem, baseline_metrics(problem))
    best_f, best_g = np.inf, None
    for lo in range(0, size, _CHUNK):
        genomes = enumerate_genomes(problem, lo, min(size, lo + _CHUNK))
        fit = evaluate(genomes)
        i = int(np.argmin(fit))
        if fit[i] < best_f:
            best_f, best_g = fit[i], genomes[i].copy()
    return OptimizationResult(
        algorithm="oracle",
        best_genome=best_g,
        best_schedule=decode(best_g, problem),
        metrics=evaluate.metrics(best_g),
        history=np.array([best_f]),
        evaluations=size,
        seed=0,
    )
