"""Fundamental investors find the median estimate, outliers notwithstanding.

Fifty investors each estimate the asset's intrinsic value (100) with noise.
Each round they will buy a unit below their estimate and sell one above it.
The round-close price settles near the median estimate. Replacing the five
largest estimates with absurd values leaves the median and the center of
value untouched. Trading still feels the outliers: when one of them bids
toward another's absurd ask, an ordinary seller may hit that bid, and a
round can close far too high. Later rounds anchor on recent trades and
work their way back to the median.
"""

import statistics

from classical_market import AssetConfig, center_of_value, draw_estimates, fundamental_session, induced_population

cfg = AssetConfig(seed=5, intrinsic_value=100, noise_sd=5, n_fundamental=50, rounds=20)
clean = fundamental_session(cfg)
median = statistics.median(clean.estimates)
print(f"median estimate {median:.2f}")
print("round closes:", " ".join(f"{c:.2f}" for c in clean.closes))

estimates = list(draw_estimates(cfg))
for i in sorted(range(len(estimates)), key=estimates.__getitem__)[-5:]:
    estimates[i] = 1e6
dirty = fundamental_session(AssetConfig(seed=5, n_fundamental=50, rounds=20, estimates=tuple(estimates)))
print("\nwith five estimates at one million")
print("round closes:", " ".join(f"{c:.2f}" for c in dirty.closes))
print("center of value, clean:", center_of_value(induced_population(clean.estimates)))
print("center of value, dirty:", center_of_value(induced_population(estimates)))
