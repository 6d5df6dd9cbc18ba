import numpy as np
import pytest

from hemsched.baseline import baseline_genome, baseline_metrics
from hemsched.domain import Appliance, decode
from hemsched.errors import ConfigError
from hemsched.hsa import (
    NOISE_CHUNK,
    HarmonyMemory,
    HSAParams,
    _draw_noise,
    improvise,
    init_harmony_memory,
    replace_worst,
    run_hsa,
)
from hemsched.objective import Evaluator

from helpers import INT, NI, toy_problem


def test_init_is_seeded_sorted_and_injected(household):
    params = HSAParams(seed=11)
    base = baseline_genome(household)
    a = init_harmony_memory(household, params, base)
    b = init_harmony_memory(household, params, base)
    assert np.array_equal(a.genomes, b.genomes) and np.array_equal(a.fitness, b.fitness)
    assert np.all(np.diff(a.fitness) >= 0)
    assert any(np.array_equal(g, base) for g in a.genomes)
    assert len(a) == 30


def test_bits_of_random_members_are_uniform(household):
    params = HSAParams(hms=5)
    base = baseline_genome(household)
    ns = household.layout.n_starts
    ones = np.zeros(household.layout.length - ns)
    inits = 10_000
    for seed in range(inits):
        mem = init_harmony_memory(household, HSAParams(hms=5, seed=seed), base)
        ones += mem.genomes[:, ns:].sum(axis=0) - base[ns:]
    n = inits * (params.hms - 1)
    chi2 = (((ones - n / 2) ** 2) / (n / 4)).sum()
    k = len(ones)
    assert chi2 < k + 3 * np.sqrt(2 * k)
    assert np.all(np.abs(ones - n / 2) < 4.5 * np.sqrt(n / 4))


def _memory(genomes):
    g = np.array(genomes, dtype=np.int64)
    return HarmonyMemory(g, np.arange(len(g), dtype=float))


BITS = toy_problem([6.5, 9.4, 13.2, 6.5, 9.4, 13.2], [Appliance("x", 1.0, 3, INT, 0)])
MIXED = toy_problem([6.5, 9.4, 13.2, 6.5, 9.4, 13.2],
                    [Appliance("w", 1.0, 2, NI, 0), Appliance("x", 1.0, 3, INT, 0)])


def test_full_consideration_without_adjustment_copies():
    rng = np.random.default_rng(0)
    params = HSAParams(hmcr=1.0, par_rate=0.0)
    sole = [[1, 0, 1, 1, 0, 0]]
    assert improvise(_memory(sole), BITS, params, rng).tolist() == sole[0]
    two = _memory([[2, 0, 0, 0, 0, 0, 0], [4, 1, 1, 1, 1, 1, 1]])
    for _ in range(50):
        h = improvise(two, MIXED, params, rng)
        assert all(h[j] in (two.genomes[0, j], two.genomes[1, j]) for j in range(7))


def test_forced_adjustment_complements_bits():
    rng = np.random.default_rng(1)
    params = HSAParams(hmcr=1.0, par_rate=1.0)
    sole = [1, 0, 1, 1, 0, 0]
    assert improvise(_memory([sole]), BITS, params, rng).tolist() == [1 - b for b in sole]
    # start genes step by one and stay in range
    for start in (0, 4):
        h = improvise(_memory([[start, 0, 0, 0, 0, 0, 0]]), MIXED, params, rng)
        assert abs(h[0] - start) <= 1 and 0 <= h[0] <= 4


def test_zero_consideration_ignores_memory():
    params = HSAParams(hmcr=0.0)
    mem_a = _memory([[0] * 6, [0] * 6])
    mem_b = _memory([[1] * 6, [1] * 6])
    draws_a = [improvise(mem_a, BITS, params, np.random.default_rng(s)).tolist() for s in range(30)]
    draws_b = [improvise(mem_b, BITS, params, np.random.default_rng(s)).tolist() for s in range(30)]
    assert draws_a == draws_b
    assert len({tuple(d) for d in draws_a}) > 10


def test_replace_worst_rules():
    mem = _memory([[0] * 6, [1] * 6, [2] * 6])  # fitness 0, 1, 2
    assert not replace_worst(mem, np.full(6, 9), 2.0)
    assert not replace_worst(mem, np.full(6, 9), 3.0)
    assert mem.fitness.tolist() == [0, 1, 2]
    assert replace_worst(mem, np.full(6, 7), -1.0)
    assert mem.fitness.tolist() == [-1, 0, 1]
    assert mem.genomes[0].tolist() == [7] * 6
    assert replace_worst(mem, np.full(6, 5), 0.0)
    assert mem.fitness.tolist() == [-1, 0, 0]
    assert mem.genomes[2].tolist() == [5] * 6  # ties go behind existing members


def _sequential_hsa(problem, params):
    """One improvisation at a time, gene by gene, from the same random stream."""
    rng = np.random.default_rng(params.seed)
    evaluate = Evaluator(problem, baseline_metrics(problem))
    mem = init_harmony_memory(problem, params, baseline_genome(problem), rng, evaluate)
    highs, ns = problem.layout.highs, problem.layout.n_starts
    history = [mem.best_fitness]
    noise = None
    for k in range(params.ni):
        if k % NOISE_CHUNK == 0:
            noise = _draw_noise(rng, min(NOISE_CHUNK, params.ni - k), len(mem), highs)
        r = k % NOISE_CHUNK
        cand = np.empty(len(highs), dtype=np.int64)
        for j in range(len(highs)):
            if noise.consider[r, j] < params.hmcr:
                v = mem.genomes[noise.donor[r, j], j]
                if noise.adjust[r, j] < params.par_rate:
                    v = 1 - v if j >= ns else min(max(v + noise.step[r, j], 0), highs[j])
            else:
                v = noise.fresh[r, j]
            cand[j] = v
        replace_worst(mem, cand, float(evaluate(cand)[0]))
        history.append(mem.best_fitness)
    return mem, np.array(history)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_block_evaluation_matches_sequential_reference(household, seed):
    params = HSAParams(hms=10, ni=2500, seed=seed)
    mem, history = _sequential_hsa(household, params)
    res = run_hsa(household, params)
    assert np.array_equal(res.history, history)
    assert np.array_equal(res.best_genome, mem.genomes[0])


def test_run_is_reproducible_and_monotone(household, household30):
    for p in (household, household30):
        params = HSAParams(hms=15, ni=1500, seed=5)
        a, b = run_hsa(p, params), run_hsa(p, params)
        assert a == b
        assert len(a.history) == 1501
        assert a.evaluations == 1515
        assert np.all(np.diff(a.history) <= 0)
        assert a.metrics.fitness <= baseline_metrics(p).fitness
        assert a.metrics.fitness == a.history[-1]
        assert decode(a.best_genome, p) == a.best_schedule


def test_worst_member_never_gets_worse(household):
    params = HSAParams(hms=8, seed=3)
    rng = np.random.default_rng(3)
    evaluate = Evaluator(household, baseline_metrics(household))
    mem = init_harmony_memory(household, params, baseline_genome(household), rng, evaluate)
    worst = mem.worst_fitness
    for _ in range(500):
        h = improvise(mem, household, params, rng)
        replace_worst(mem, h, float(evaluate(h)[0]))
        assert mem.worst_fitness <= worst
        worst = mem.worst_fitness
        assert np.all(np.diff(mem.fitness) >= 0)


def test_bandwidth_is_accepted_but_unused(household):
    a = run_hsa(household, HSAParams(ni=300, seed=2))
    b = run_hsa(household, HSAParams(ni=300, seed=2, bw=0.2))
    assert a == b


@pytest.mark.parametrize("kw", [dict(hms=1), dict(ni=0), dict(hmcr=1.1), dict(par_rate=-0.5), dict(seed=2**64)])
def test_bad_parameters(kw):
    with pytest.raises(ConfigError):
        HSAParams(**kw)
