import numpy as np

from hemsched.baseline import baseline_genome, baseline_metrics, baseline_schedule
from hemsched.domain import Appliance, decode, validate_schedule
from hemsched.objective import energy_profile, par

from helpers import FIX, NI, toy_problem


def test_washer_runs_from_seven_to_fourteen(household):
    row = baseline_schedule(household).row(household.appliance_index("washing_machine"))
    assert np.flatnonzero(row).tolist() == list(range(7, 15))


def test_shared_start_stacks_energy():
    p = toy_problem([6.5] * 4, [Appliance("a", 1.5, 2, NI, 1), Appliance("b", 0.5, 1, FIX, 1)])
    e = energy_profile(baseline_schedule(p), p)
    assert e.tolist() == [0.0, 2.0, 1.5, 0.0]


def test_shipped_baseline_is_peaky_and_feasible(household, household30):
    for p in (household, household30):
        s = baseline_schedule(p)
        assert par(energy_profile(s, p)) > 1.5
        assert validate_schedule(s, p) == []
        assert baseline_metrics(p).penalty == 0


def test_baseline_survives_encode_decode(household):
    assert decode(baseline_genome(household), household) == baseline_schedule(household)


def test_baseline_is_deterministic(household):
    assert baseline_schedule(household) == baseline_schedule(household)
    assert baseline_metrics(household) == baseline_metrics(household)
