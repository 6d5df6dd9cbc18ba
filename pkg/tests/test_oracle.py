import numpy as np
import pytest

from hemsched.domain import Appliance
from hemsched.errors import SearchSpaceTooLarge
from hemsched.ga import GAParams, run_ga
from hemsched.hsa import HSAParams, run_hsa
from hemsched.objective import Evaluator
from hemsched.oracle import brute_force, enumerate_genomes, space_size

from helpers import FIX, INT, NI, tiny_problem, toy_problem

FLAT = [10.0] * 4


def test_flat_tariff_tie_goes_to_slot_zero():
    p = toy_problem(FLAT, [Appliance("x", 1.0, 1, INT, 0)], weights=(1.0, 0.0))
    assert brute_force(p).best_schedule.row(0).tolist() == [1, 0, 0, 0]


def test_cheapest_single_slot():
    p = toy_problem([13.2, 6.5, 9.4, 6.5], [Appliance("x", 1.0, 1, INT, 0)], weights=(1.0, 0.0))
    res = brute_force(p)
    assert res.best_schedule.row(0).tolist() == [0, 1, 0, 0]
    assert res.evaluations == 16


def test_contiguous_block_moves_to_cheap_end():
    p = toy_problem([13.2, 13.2, 6.5, 6.5], [Appliance("w", 1.0, 2, NI, 0)], weights=(1.0, 0.0))
    res = brute_force(p)
    assert res.best_genome.tolist() == [2]
    assert res.metrics.total_cost_cents == 13.0


def test_space_sizes():
    one_start = toy_problem([6.5] * 4, [Appliance("w", 1, 2, NI, 0), Appliance("x", 1, 1, INT, 0)])
    assert space_size(one_start) == 48
    assert space_size(toy_problem([6.5] * 4, [Appliance("f", 1, 2, FIX, 0)])) == 1
    twenty = toy_problem([6.5] * 10, [Appliance("x", 1, 3, INT, 0), Appliance("y", 1, 3, INT, 0)])
    assert space_size(twenty) == 2**20


def test_refuses_oversized_space(household):
    with pytest.raises(SearchSpaceTooLarge) as info:
        brute_force(household)
    assert info.value.size == space_size(household)


def test_fixed_only_problem_returns_baseline():
    p = toy_problem([6.5, 13.2], [Appliance("f", 1.0, 1, FIX, 1)])
    res = brute_force(p)
    assert res.metrics.fitness == 1.0
    assert res.best_genome.size == 0


def test_enumeration_is_lexicographic_and_complete():
    p = toy_problem([6.5] * 4, [Appliance("w", 1, 2, NI, 0), Appliance("x", 1, 1, INT, 0)])
    g = enumerate_genomes(p, 0, space_size(p))
    assert g[0].tolist() == [0, 0, 0, 0, 0] and g[-1].tolist() == [2, 1, 1, 1, 1]
    assert len({tuple(r) for r in g}) == 48
    assert [tuple(r) for r in g] == sorted(tuple(r) for r in g)


class _Spy(Evaluator):
    seen: list = []

    def __call__(self, genomes, **kw):
        f = super().__call__(genomes, **kw)
        _Spy.seen.append(np.asarray(f).min())
        return f


def test_optimizers_never_beat_the_oracle(monkeypatch):
    from hemsched import ga, hsa

    monkeypatch.setattr(ga, "Evaluator", _Spy)
    monkeypatch.setattr(hsa, "Evaluator", _Spy)
    rng = np.random.default_rng(123)
    for _ in range(4):
        p = tiny_problem(rng, max_space=2**12)
        optimum = brute_force(p).metrics.fitness
        _Spy.seen = []
        run_ga(p, GAParams(population_size=20, generations=10, seed=1))
        run_hsa(p, HSAParams(hms=10, ni=300, seed=1))
        assert min(_Spy.seen) >= optimum - 1e-12
