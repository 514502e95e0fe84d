"""Aggregate demand built from wealth, and how it smooths with numbers.

Each buyer will spend a fraction of their wealth on the good. Wealth is
triangular with its mode at zero, so poor buyers far outnumber rich ones. Aggregating more buyers makes
the demand staircase finer; its largest step shrinks roughly like 1/n.
"""

from classical_market import DistributionSpec, GarnierSpec, demand_at, garnier_population, law_of_demand_report

wealth_dist = DistributionSpec.triangular(0, 0, 1000)
share = DistributionSpec.uniform(0.05, 0.2)

for n in (10, 100, 1000, 10_000):
    pop = garnier_population(GarnierSpec(wealth_dist, n, seed=7, fraction=share))
    report = law_of_demand_report(pop)
    print(f"n={n:>6}  monotone={report['is_monotone']}  largest step={report['max_step']:.5f}")

pop = garnier_population(GarnierSpec(wealth_dist, 10_000, seed=7, fraction=share))
print("\nbuyers willing to pay at least p:")
for p in (5, 25, 50, 100, 150):
    print(f"  p={p:>3}: {demand_at(pop, p)}")
