"""Small problem builders shared by the test modules."""

import numpy as np

from hemsched.domain import Appliance, FlexClass, Problem, TimeGrid
from hemsched.oracle import space_size
from hemsched.tariff import TariffProfile

FIX, NI, INT = FlexClass.FIXED, FlexClass.NON_INTERRUPTIBLE, FlexClass.INTERRUPTIBLE
TOU_LEVELS = (6.5, 9.4, 13.2)


def toy_problem(prices, appliances, capacity=100.0, weights=(0.5, 0.5), resolution=60, **kw):
    """Problem on a grid exactly as long as ``prices``."""
    n = len(prices)
    hours, rem = divmod(n * resolution, 60)
    assert rem == 0
    return Problem(
        grid=TimeGrid(hours, resolution),
        appliances=tuple(appliances),
        tariff=TariffProfile.from_slot_prices(prices, resolution),
        grid_capacity_kwh=capacity,
        w_cost=weights[0],
        w_par=weights[1],
        **kw,
    )


def tiny_problem(rng, max_space=2**16):
    """Random instance with two interruptible loads and optional extras."""
    while True:
        T = int(rng.integers(5, 8))
        prices = rng.choice(TOU_LEVELS, size=T)
        apps = [
            Appliance(f"int{k}", float(rng.choice([0.5, 1.0, 1.44, 2.0, 4.45])), int(rng.integers(1, T)), INT, 0)
            for k in range(2)
        ]
        if rng.random() < 0.6:
            apps.append(Appliance("ni", float(rng.choice([0.7, 1.8])), int(rng.integers(1, 4)), NI, 0))
        if rng.random() < 0.5:
            r = int(rng.integers(1, 4))
            apps.append(Appliance("fix", 0.3, r, FIX, int(rng.integers(0, T - r + 1))))
        w = float(rng.uniform(0.2, 0.8))
        cap = float(rng.choice([4.0, 6.0, 10.0]))
        if cap < max(a.power_rating_kw for a in apps):
            continue
        p = toy_problem(prices, apps, capacity=cap, weights=(w, 1 - w))
        if space_size(p) <= max_space:
            return p
