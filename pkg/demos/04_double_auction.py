"""A continuous double auction converging on the center of value.

Eight buyers and eight sellers with random private values trade over five
periods. Zero-intelligence traders quote at random inside their no-loss
range; adaptive traders open away from the market and concede toward the
other side. Efficiency is realized surplus as a share of the maximum; alpha
is the RMS gap between trade prices and the center of value.
"""

import statistics

from classical_market import (
    DistributionSpec,
    GarnierSpec,
    Population,
    SessionConfig,
    center_of_value,
    cost_population,
    garnier_population,
    run_session,
)

uniform = DistributionSpec.uniform(0, 100)
pop = Population(garnier_population(GarnierSpec(uniform, 8, seed=21)).buyers, cost_population(uniform, 8, seed=21).sellers)
print("center of value:", center_of_value(pop))

for policy in ("zic", "adaptive"):
    result = run_session(SessionConfig(periods=5, steps_per_period=1000, policy=policy, seed=21), pop)
    print(f"\n{policy}")
    for period, (trades, eff, a) in enumerate(zip(result.trades, result.efficiency, result.alpha), start=1):
        prices = ", ".join(f"{t.price:.2f}" for t in trades)
        print(f"  period {period}: efficiency {eff:6.2f}%  alpha {a:6.2f}  prices [{prices}]")
    print(f"  mean efficiency {statistics.fmean(result.efficiency):.2f}%")
