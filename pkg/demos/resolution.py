"""
Hourly versus half-hourly slots
===============================

Halving the slot length doubles the genome of every interruptible load.
The unscheduled day is the same day either way, so its cost and PAR
match exactly; the optimizers get a finer search space.
"""

import numpy as np

import hemsched as hs

hourly = hs.default_problem()
half = hs.with_resolution(hourly, 30)
print("genome length:", hourly.layout.length, "->", half.layout.length)

for p in (hourly, half):
    m = hs.baseline_metrics(p)
    print(f"{p.grid.resolution_minutes:>2} min baseline  cost {m.total_cost_cents:.4f} c  PAR {m.par:.6f}")

b60 = hs.baseline_schedule(hourly).states
b30 = hs.baseline_schedule(half).states
print("half-hour baseline is the hourly one with every bit doubled:",
      np.array_equal(np.repeat(b60, 2, axis=1), b30))

for p in (hourly, half):
    ref = hs.baseline_metrics(p)
    res = hs.run_hsa(p, hs.HSAParams(seed=3))
    m = res.metrics
    print(f"{p.grid.resolution_minutes:>2} min HSA  cost -{hs.reduction_pct(ref.total_cost_cents, m.total_cost_cents):.2f}%"
          f"  PAR -{hs.reduction_pct(ref.par, m.par):.2f}%")
