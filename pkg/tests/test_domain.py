import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hemsched.baseline import baseline_schedule
from hemsched.domain import (
    DEFAULT_PROBLEM_PATH,
    Appliance,
    Schedule,
    build_time_grid,
    decode,
    decode_batch,
    encode,
    problem_from_dict,
    problem_to_dict,
    random_genomes,
    repair_row,
    required_slots,
    validate_schedule,
    with_resolution,
)
from hemsched.errors import ConfigError, EncodingError, StructuralError

from helpers import FIX, INT, NI, toy_problem


# --- grid -------------------------------------------------------------------


@pytest.mark.parametrize("res, slots, dur", [(60, 24, Fraction(1)), (30, 48, Fraction(1, 2)), (15, 96, Fraction(1, 4))])
def test_build_time_grid(res, slots, dur):
    g = build_time_grid(24, res)
    assert g.slot_count == slots
    assert g.slot_duration_h == dur


@pytest.mark.parametrize("res", [45, 7, 0, -30])
def test_resolution_must_divide_an_hour(res):
    with pytest.raises(ConfigError, match=str(res)):
        build_time_grid(24, res)


def test_required_slots(household, household30):
    washer = household.appliances[household.appliance_index("washing_machine")]
    fan = household.appliances[household.appliance_index("ceiling_fan")]
    assert required_slots(washer, household.grid) == 8
    assert required_slots(washer, household30.grid) == 16
    assert required_slots(fan, household.grid) == 14


# --- repair -----------------------------------------------------------------


def test_repair_drops_dearest_first():
    out = repair_row([1, 1, 1, 0], 2, [13.2, 6.5, 6.5, 6.5])
    assert out.tolist() == [0, 1, 1, 0]


def test_repair_adds_cheapest_lowest_index():
    out = repair_row([0, 0, 0, 0], 1, [9.4, 6.5, 6.5, 13.2])
    assert out.tolist() == [0, 1, 0, 0]


def test_repair_identity_when_count_already_right():
    bits = [1, 0, 1, 0, 0, 1]
    assert repair_row(bits, 3, [13.2, 6.5, 9.4, 6.5, 6.5, 13.2]).tolist() == bits


def _min_cost_repairs(n, prices):
    """For every input vector and target count, the least cost reachable with minimal flips."""
    allv = np.array(list(itertools.product([0, 1], repeat=n)), dtype=np.int64)
    pc = allv.sum(1)
    cost = allv @ prices
    ham = (allv[:, None, :] != allv[None, :, :]).sum(-1)
    best = {}
    for r in range(n + 1):
        need = np.abs(r - pc)
        ok = (pc[None, :] == r) & (ham == need[:, None])
        best[r] = np.where(ok, cost[None, :], np.inf).min(axis=1)
    return allv, best


@pytest.mark.parametrize("n", range(1, 13))
def test_repair_matches_exhaustive_minimum(n):
    rng = np.random.default_rng(n)
    prices = rng.choice([6.5, 9.4, 13.2], size=n)
    allv, best = _min_cost_repairs(n, prices)
    for r in range(n + 1):
        for k, v in enumerate(allv):
            out = repair_row(v, r, prices)
            assert out.sum() == r
            assert (out != v).sum() == abs(r - v.sum())
            assert out @ prices == pytest.approx(best[r][k], abs=1e-9)


# --- decode ----------------------------------------------------------------


def test_noninterruptible_decodes_to_contiguous_run():
    p = toy_problem([6.5] * 6, [Appliance("washer", 1.0, 3, NI, 0)])
    s = decode(np.array([2]), p)
    assert s.row(0).tolist() == [0, 0, 1, 1, 1, 0]


def test_all_zero_interruptible_bits_are_repaired():
    p = toy_problem([9.4, 6.5, 13.2, 6.5], [Appliance("heater", 1.0, 2, INT, 0)])
    s = decode(np.zeros(4, dtype=int), p)
    assert s.row(0).tolist() == [0, 1, 0, 1]
    assert validate_schedule(s, p) == []


def test_fixed_row_ignores_genome():
    p = toy_problem(
        [6.5] * 6,
        [Appliance("lamp", 0.1, 2, FIX, 3), Appliance("heater", 1.0, 2, INT, 0)],
    )
    rng = np.random.default_rng(0)
    for g in random_genomes(p, 50, rng):
        assert decode(g, p).row(0).tolist() == [0, 0, 0, 1, 1, 0]


def test_decode_rejects_bad_genomes(household):
    L = household.layout.length
    with pytest.raises(EncodingError, match="length"):
        decode(np.zeros(L - 1, dtype=int), household)
    g = np.zeros(L, dtype=int)
    g[0] = household.layout.highs[0] + 1
    with pytest.raises(EncodingError, match="outside"):
        decode(g, household)
    g[0] = -1
    with pytest.raises(EncodingError):
        decode(g, household)


@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_decoded_schedules_satisfy_structure(data, household30):
    highs = household30.layout.highs
    g = np.array([data.draw(st.integers(0, int(h))) for h in highs])
    v = validate_schedule(decode(g, household30), household30)
    assert not [x for x in v if x.constraint in {"count", "contiguity", "fixed", "binary"}]


def test_decode_is_pure(household):
    rng = np.random.default_rng(1)
    genomes = random_genomes(household, 1000, rng)
    a = decode_batch(genomes, household)
    b = decode_batch(genomes.copy(), household)
    assert np.array_equal(a, b)
    assert np.array_equal(a[17], decode(genomes[17], household).states)


def test_encode_inverts_decode(household):
    rng = np.random.default_rng(2)
    for g in random_genomes(household, 20, rng):
        s = decode(g, household)
        assert decode(encode(s, household), household) == s


def test_encode_rejects_broken_rows(household):
    s = baseline_schedule(household)
    states = s.states.copy()
    w = household.appliance_index("washing_machine")
    states[w, 7] = 0
    with pytest.raises(EncodingError):
        encode(Schedule(states), household)


# --- validation -------------------------------------------------------------


def test_iron_before_washer_is_a_precedence_violation(household):
    states = baseline_schedule(household).states.copy()
    w, i = household.appliance_index("washing_machine"), household.appliance_index("iron")
    states[i] = 0
    states[i, 10:17] = 1  # iron starts while the washer (7..14) still runs
    v = validate_schedule(Schedule(states), household)
    assert [(x.appliance, x.slot) for x in v if x.constraint == "precedence"] == [("iron", 10)]


def test_capacity_violation_names_the_slot():
    p = toy_problem([6.5] * 4, [Appliance("a", 2.0, 1, FIX, 1), Appliance("b", 2.0, 1, FIX, 1)], capacity=3.0)
    v = validate_schedule(baseline_schedule(p), p)
    assert [(x.constraint, x.slot) for x in v] == [("capacity", 1)]


def test_count_and_contiguity_violations(household):
    states = baseline_schedule(household).states.copy()
    w = household.appliance_index("washing_machine")
    states[w, 10] = 0
    states[w, 20] = 1
    kinds = {x.constraint for x in validate_schedule(Schedule(states), household)}
    assert "contiguity" in kinds
    states[w, 20] = 0
    kinds = {x.constraint for x in validate_schedule(Schedule(states), household)}
    assert {"count", "contiguity"} <= kinds


def test_shape_mismatch_is_structural(household):
    with pytest.raises(StructuralError):
        validate_schedule(Schedule(np.zeros((3, 24), dtype=np.uint8)), household)


# --- configuration ----------------------------------------------------------


def _doc():
    doc = json.loads(DEFAULT_PROBLEM_PATH.read_text())
    doc["tariff"] = {"bands": [{"start": "00:00", "end": "24:00", "price": 10.0, "label": "off_peak"}]}
    return doc


def test_problem_dict_round_trip(household):
    assert problem_from_dict(problem_to_dict(household)) == household


@pytest.mark.parametrize("mutate, match", [
    (lambda d: d.update(colour="red"), "unknown fields"),
    (lambda d: d["appliances"][0].update(watts=3), "unknown fields"),
    (lambda d: d["appliances"][0].pop("oti_hours"), "missing"),
    (lambda d: d["appliances"][0].update({"class": "sometimes"}), "class"),
    (lambda d: d["appliances"][5].update(predecessor="dryer"), "dryer"),
    (lambda d: d["appliances"][1].update(name="ceiling_fan"), "duplicate"),
    (lambda d: d.update(weights={"cost": 0.7, "par": 0.7}), "sum to 1"),
    (lambda d: d.update(capacity_kwh=1.0), "no feasible schedule"),
    (lambda d: d["appliances"][0].update(oti_hours=25), "exceeds"),
    (lambda d: d["appliances"][4].update(fixed_start=3), "fixed_start"),
    (lambda d: d["appliances"][0].update(baseline_start=20), "overflows"),
])
def test_bad_problem_documents(mutate, match):
    doc = _doc()
    mutate(doc)
    with pytest.raises(ConfigError, match=match):
        problem_from_dict(doc)


def test_capacity_must_cover_largest_appliance():
    with pytest.raises(ConfigError):
        toy_problem([6.5] * 4, [Appliance("a", 5.0, 1, INT, 0)], capacity=4.0)


def test_with_resolution_keeps_wall_clock(household, household30):
    for a60, a30 in zip(household.appliances, household30.appliances):
        assert a30.baseline_start_slot == 2 * a60.baseline_start_slot
    assert household30.grid_capacity_kwh == household.grid_capacity_kwh / 2
    assert np.array_equal(np.repeat(baseline_schedule(household).states, 2, axis=1),
                          baseline_schedule(household30).states)


def test_genome_layout_of_household(household, household30):
    # two start genes, then 24 bits for each of AC and heater
    assert household.layout.length == 2 + 2 * 24
    assert household.layout.highs[:2].tolist() == [24 - 8, 24 - 7]
    assert household30.layout.length == 2 + 2 * 48
