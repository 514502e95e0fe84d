"""Credit-fuelled trend following: a bubble, a crash and fat tails.

Fifteen fundamental investors share the market with thirty-five
speculators who extrapolate recent price changes. Speculators buy on
credit whose ceiling grows 8% a round until round 26 and then stays flat.
Prices climb with the credit line and collapse once it stops growing.
Returns show excess kurtosis well above a fundamentals-only market.
"""

from classical_market import (
    AssetConfig,
    credit_ramp,
    fundamental_session,
    max_drawdown,
    speculative_session,
    tail_summary,
)

FREEZE = 26
cfg = AssetConfig(
    seed=3, n_fundamental=15, n_speculators=35, theta=1.5, window=3, rounds=40,
    credit=credit_ramp(110, 0.08, FREEZE, 40),
)
result = speculative_session(cfg)
baseline = fundamental_session(cfg)

for r, (close, credit) in enumerate(zip(result.closes, cfg.credit), start=1):
    bar = "#" * int(close / 20)
    print(f"round {r:>2}  credit {credit:8.2f}  close {close:8.2f}  {bar}")

print(f"\npeak {max(result.closes):.2f} against intrinsic value {cfg.intrinsic_value}")
print(f"drawdown before freeze {max_drawdown(result.closes[:FREEZE]):.2f}, after {max_drawdown(result.closes[FREEZE - 1:]):.2f}")
print("speculative returns:", tail_summary(result.returns))
print("fundamental returns:", tail_summary(baseline.returns))
