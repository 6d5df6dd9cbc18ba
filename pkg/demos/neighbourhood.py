"""
A street of households
======================

Many users share the base household but shift their habits by up to two
hours.  Each gets an independent seed derived from the master seed, and
the report aggregates their loads before computing reductions.
"""

import hemsched as hs

home = hs.default_problem()

for users in (1, 10):
    sc = hs.Scenario(base_problem=home, n_users=users, master_seed=0,
                     ga=hs.GAParams(population_size=60, generations=80),
                     hsa=hs.HSAParams(ni=5000))
    report = hs.run_scenario(sc)
    print(hs.render_report(report, "table"))

# With no jitter, every user is the same household: sums scale by the
# user count and PAR does not move.
flat = [hs.run_scenario(hs.Scenario(base_problem=home, n_users=n, jitter=0, algorithm="none"))
        for n in (1, 10)]
a, b = (r.aggregate["without"] for r in flat)
print(f"identical users: cost x{b.cost_cents / a.cost_cents:.6f}, PAR {a.par:.6f} vs {b.par:.6f}")

# Per-user rows, ready for a spreadsheet.
print(hs.render_report(report, "csv").splitlines()[0])
print(hs.render_report(report, "csv").splitlines()[1])
