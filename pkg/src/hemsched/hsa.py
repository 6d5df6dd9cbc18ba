"""Harmony search over schedule genomes.

Each improvisation decides every gene independently: with probability
``hmcr`` it copies that gene from a uniformly chosen memory member (and
then, with probability ``par_rate``, pitch-adjusts it: bits flip, start
genes step by +/-1 and are clamped), otherwise it draws the gene fresh
from its range.  A candidate replaces the worst memory member only if it
is strictly better.

Random draws never depend on the memory contents, so ``run_hsa`` draws
them up front in chunks of :data:`NOISE_CHUNK` improvisations.  That lets
it build and score several candidates at once against the current
memory; after the first accepted candidate in a block, the rest of the
block is rebuilt against the updated memory.  The outcome is identical
to improvising strictly one at a time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .baseline import baseline_genome, baseline_metrics
from .domain import Genome, Problem, decode, random_genomes
from .errors import ConfigError
from .objective import Evaluator
from .results import OptimizationResult

log = logging.getLogger(__name__)

NOISE_CHUNK = 1024
_MAX_BLOCK = 256


@dataclass(frozen=True)
class HSAParams:
    hms: int = 30
    hmcr: float = 0.9
    par_rate: float = 0.3
    ni: int = 20_000
    seed: int = 0
    bw: float | None = None  # accepted for completeness; unused on discrete genes

    def __post_init__(self):
        if self.hms < 2:
            raise ConfigError("hms must be >= 2")
        if self.ni < 1:
            raise ConfigError("ni must be >= 1")
        for name in ("hmcr", "par_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")


class HarmonyMemory:
    """Genomes kept sorted by fitness, best first."""

    def __init__(self, genomes: np.ndarray, fitness: np.ndarray):
        order = np.argsort(fitness, kind="stable")
        self.genomes = np.array(genomes, dtype=np.int64)[order]
        self.fitness = np.array(fitness, dtype=float)[order]

    def __len__(self):
        return len(self.fitness)

    @property
    def best_fitness(self) -> float:
        return float(self.fitness[0])

    @property
    def worst_fitness(self) -> float:
        return float(self.fitness[-1])


def init_harmony_memory(
    problem: Problem,
    params: HSAParams,
    baseline: Genome,
    rng: np.random.Generator | None = None,
    evaluate: Evaluator | None = None,
) -> HarmonyMemory:
    if rng is None:
        rng = np.random.default_rng(params.seed)
    if evaluate is None:
        evaluate = Evaluator(problem, baseline_metrics(problem))
    genomes = random_genomes(problem, params.hms, rng)
    genomes[0] = baseline
    return HarmonyMemory(genomes, evaluate(genomes))


@dataclass
class _Noise:
    consider: np.ndarray
    donor: np.ndarray
    adjust: np.ndarray
    fresh: np.ndarray
    step: np.ndarray

    def __getitem__(self, s: slice) -> _Noise:
        return _Noise(self.consider[s], self.donor[s], self.adjust[s], self.fresh[s], self.step[s])


def _draw_noise(rng, n: int, memory_size: int, highs: np.ndarray) -> _Noise:
    shape = (n, len(highs))
    return _Noise(
        consider=rng.random(shape),
        donor=rng.integers(0, memory_size, size=shape),
        adjust=rng.random(shape),
        fresh=rng.integers(0, highs + 1, size=shape, dtype=np.int64),
        step=rng.integers(0, 2, size=shape, dtype=np.int64) * 2 - 1,
    )


def _build(memory: HarmonyMemory, noise: _Noise, hmcr: float, par_rate: float, highs, n_starts) -> np.ndarray:
    from_memory = noise.consider < hmcr
    copied = memory.genomes[noise.donor, np.arange(len(highs))]
    out = np.where(from_memory, copied, noise.fresh)
    adjust = from_memory & (noise.adjust < par_rate)
    out[:, n_starts:] ^= adjust[:, n_starts:]
    shifted = out[:, :n_starts] + noise.step[:, :n_starts] * adjust[:, :n_starts]
    out[:, :n_starts] = np.clip(shifted, 0, highs[:n_starts])
    return out


def improvise(memory: HarmonyMemory, problem: Problem, params: HSAParams, rng) -> Genome:
    layout = problem.layout
    noise = _draw_noise(rng, 1, len(memory), layout.highs)
    return _build(memory, noise, params.hmcr, params.par_rate, layout.highs, layout.n_starts)[0]


def replace_worst(memory: HarmonyMemory, candidate: Genome, fitness: float) -> bool:
    """Swap out the worst member if ``fitness`` is strictly better; keeps order."""
    if not fitness < memory.fitness[-1]:
        return False
    pos = int(np.searchsorted(memory.fitness, fitness, side="right"))
    memory.genomes[pos + 1 :] = memory.genomes[pos:-1].copy()
    memory.fitness[pos + 1 :] = memory.fitness[pos:-1].copy()
    memory.genomes[pos] = candidate
    memory.fitness[pos] = fitness
    return True


def run_hsa(problem: Problem, params: HSAParams = HSAParams()) -> OptimizationResult:
    """Harmony search for ``ni`` improvisations.

    ``history[0]`` is the best fitness of the initial memory and
    ``history[k]`` the memory best after improvisation ``k``.
    """
    if params.bw is not None:
        log.info("bandwidth bw=%s ignored: pitch adjustment on discrete genes is a flip or +/-1 step", params.bw)
    rng = np.random.default_rng(params.seed)
    evaluate = Evaluator(problem, baseline_metrics(problem))
    layout = problem.layout
    highs, ns = layout.highs, layout.n_starts
    memory = init_harmony_memory(problem, params, baseline_genome(problem), rng, evaluate)

    history = np.empty(params.ni + 1)
    history[0] = memory.best_fitness
    k, block = 0, 1
    noise, noise_start = None, 0
    while k < params.ni:
        if noise is None or k >= noise_start + len(noise.consider):
            noise_start = k
            noise = _draw_noise(rng, min(NOISE_CHUNK, params.ni - k), len(memory), highs)
        lo = k - noise_start
        b = min(block, len(noise.consider) - lo)
        cands = _build(memory, noise[lo : lo + b], params.hmcr, params.par_rate, highs, ns)
        fit = evaluate(cands)
        hits = np.flatnonzero(fit < memory.fitness[-1])
        if hits.size:
            i = int(hits[0])
            history[k + 1 : k + 1 + i] = memory.best_fitness
            replace_worst(memory, cands[i], fit[i])
            history[k + 1 + i] = memory.best_fitness
            k += i + 1
            block = max(1, i + 1)
        else:
            history[k + 1 : k + 1 + b] = memory.best_fitness
            k += b
            block = min(2 * block, _MAX_BLOCK)

    best = memory.genomes[0].copy()
    return OptimizationResult(
        algorithm="hsa",
        best_genome=best,
        best_schedule=decode(best, problem),
        metrics=evaluate.metrics(best),
        history=history,
        evaluations=params.hms + params.ni,
        seed=params.seed,
    )
