"""
Checking the heuristics against exhaustive search
=================================================

On a six-hour toy day the whole genome space fits in memory, so the true
optimum is known and we can count how often each heuristic finds it.
"""

import hemsched as hs
from hemsched.domain import Appliance, FlexClass, Problem, TimeGrid

prices = [13.2, 9.4, 6.5, 6.5, 13.2, 9.4]
toy = Problem(
    grid=TimeGrid(6, 60),
    appliances=(
        Appliance("pump", 1.0, 3, FlexClass.INTERRUPTIBLE, 0),
        Appliance("heater", 2.0, 2, FlexClass.INTERRUPTIBLE, 0),
        Appliance("dryer", 1.5, 2, FlexClass.NON_INTERRUPTIBLE, 0),
    ),
    tariff=hs.TariffProfile.from_slot_prices(prices),
    grid_capacity_kwh=5.0,
)
print("genome space:", hs.space_size(toy))

best = hs.brute_force(toy)
print("optimum fitness %.6f, cost %.2f c, PAR %.3f" % (
    best.metrics.fitness, best.metrics.total_cost_cents, best.metrics.par))
for a, row in zip(toy.appliances, best.best_schedule.states):
    print(f"  {a.name:<7}", "".join("#" if b else "." for b in row))

hits = {"ga": 0, "hsa": 0}
for seed in range(30):
    hits["ga"] += hs.run_ga(toy, hs.GAParams(seed=seed, generations=60)).metrics.fitness == best.metrics.fitness
    hits["hsa"] += hs.run_hsa(toy, hs.HSAParams(seed=seed, ni=3000)).metrics.fitness == best.metrics.fitness
print("seeds reaching the optimum out of 30:", hits)
