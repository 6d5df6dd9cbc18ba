"""
One household, two schedulers
=============================

Load the shipped eight-appliance household, look at its unscheduled day,
then let the genetic algorithm and harmony search move the flexible loads.
"""

import numpy as np

import hemsched as hs

home = hs.default_problem()
base = hs.baseline_schedule(home)
profile = hs.energy_profile(base, home)

# The unscheduled day piles the water heater, oven and washer into the
# priced morning hours.
print("baseline cost  %.2f c" % hs.total_cost(profile, home.tariff, home.grid))
print("baseline PAR   %.3f" % hs.par(profile))
print("baseline peak  %.3f kWh at %02d:00" % (profile.max(), profile.argmax()))

ga = hs.run_ga(home, hs.GAParams(seed=1))
hsa = hs.run_hsa(home, hs.HSAParams(seed=1))
ref = hs.baseline_metrics(home)

for res in (ga, hsa):
    m = res.metrics
    print(f"\n{res.algorithm.upper()}  fitness {m.fitness:.4f} after {res.evaluations} evaluations")
    print(f"  cost {m.total_cost_cents:.2f} c  ({hs.reduction_pct(ref.total_cost_cents, m.total_cost_cents):.1f}% lower)")
    print(f"  PAR  {m.par:.3f}    ({hs.reduction_pct(ref.par, m.par):.1f}% lower)")

# Each row is one appliance; '#' marks an ON hour.
print("\nGA schedule, 00h..23h")
for a, row in zip(home.appliances, ga.best_schedule.states):
    print(f"  {a.name:<16} " + "".join("#" if b else "." for b in row))

prices = home.prices
print("\nprice          " + " ".join(f"{p:4.1f}" for p in prices[::3]) + "  (every 3rd hour)")
print("kWh before     " + " ".join(f"{e:4.1f}" for e in profile[::3]))
after = hs.energy_profile(ga.best_schedule, home)
print("kWh after GA   " + " ".join(f"{e:4.1f}" for e in after[::3]))
assert np.isclose(after.sum(), profile.sum())
