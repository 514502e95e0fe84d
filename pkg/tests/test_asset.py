import collections
import statistics

import pytest

from classical_market import (
    AssetConfig,
    EmptyMarket,
    Speculator,
    center_of_value,
    credit_ramp,
    draw_estimates,
    fundamental_session,
    induced_population,
    speculative_session,
    speculator_reservation,
    tail_summary,
)
from classical_market.core import Side

RAMP = credit_ramp(110, 0.08, 26, 40)


def spec_config(seed, **kw):
    base = dict(seed=seed, n_fundamental=15, n_speculators=35, window=3, theta=1.5, rounds=40, credit=RAMP)
    base.update(kw)
    return AssetConfig(**base)


def test_speculator_reservation_examples():
    assert speculator_reservation(Speculator("x", 1, 2.0), [100]).side is None
    res = speculator_reservation(Speculator("x", 1, 1.5), [100, 102])
    assert res.price == pytest.approx(105) and res.side is Side.BUYER
    res = speculator_reservation(Speculator("x", 1, 1.0), [102, 100])
    assert res.price == pytest.approx(98) and res.side is Side.SELLER
    assert speculator_reservation(Speculator("x", 1, 1.5), []).side is None


def test_reservation_window_is_truncated_to_the_history():
    # mean change over min(m, n - 1) = 2 steps
    res = speculator_reservation(Speculator("x", 5, 1.0), [100, 104, 110])
    assert res.price == pytest.approx(115)


def test_credit_ramp_grows_then_freezes():
    ramp = credit_ramp(100, 0.1, 3, 5)
    assert ramp == pytest.approx((100, 110, 121, 121, 121))


def test_identical_estimates_trade_at_that_value():
    result = fundamental_session(AssetConfig(n_fundamental=2, estimates=(100.0, 100.0), rounds=5, steps_per_round=300))
    assert result.trades
    assert all(abs(price - 100) <= 0.01 for _, _, price, _, _ in result.trades)


def test_fundamental_market_converges_to_the_median_estimate():
    result = fundamental_session(AssetConfig(seed=4))
    assert abs(result.closes[-1] - statistics.median(result.estimates)) <= 2


def test_contamination_leaves_the_median_and_the_center_unchanged():
    clean = AssetConfig(seed=6)
    est = list(draw_estimates(clean))
    for i in sorted(range(len(est)), key=est.__getitem__)[-5:]:
        est[i] = 1e6
    dirty = AssetConfig(seed=6, estimates=tuple(est))
    assert center_of_value(induced_population(draw_estimates(clean))) == center_of_value(induced_population(est))
    result = fundamental_session(dirty)
    assert abs(result.closes[-1] - statistics.median(draw_estimates(clean))) <= 2


def test_sessions_are_deterministic():
    a, b = speculative_session(spec_config(2, rounds=10, credit=RAMP[:10])), speculative_session(spec_config(2, rounds=10, credit=RAMP[:10]))
    assert a.closes == b.closes and a.events == b.events


def holdings(result, start):
    """Running units held by every trader, reconstructed from the trade tape."""
    pos = collections.defaultdict(lambda: start)
    lowest = {}
    for _, _, _, buyer, seller in result.trades:
        b, s = buyer.rstrip("bs") if buyer.startswith("F") else buyer, seller.rstrip("bs") if seller.startswith("F") else seller
        pos[b] += 1
        pos[s] -= 1
        lowest[s] = min(lowest.get(s, start), pos[s])
    return lowest


def test_no_short_selling_and_credit_is_respected():
    result = speculative_session(spec_config(1))
    lowest = holdings(result, 0)
    assert all(v >= 0 for k, v in lowest.items() if k.startswith("X"))
    for spent, cap in zip(result.spending, RAMP):
        assert all(v <= cap + 1e-9 for v in spent.values())


def test_fundamental_traders_never_sell_more_than_they_hold():
    result = fundamental_session(AssetConfig(seed=3, endowment=1, rounds=5))
    lowest = holdings(result, 1)
    assert all(v >= 0 for v in lowest.values())


def test_zero_gain_speculators_do_not_inflate_prices():
    for seed in range(3):
        result = speculative_session(spec_config(seed, theta=0.0))
        assert max(result.closes) < 1.2 * 100


def test_credit_fuelled_bubble_and_crash():
    result = speculative_session(spec_config(0))
    assert max(result.closes) > 150
    assert min(result.closes[26:]) < 0.5 * max(result.closes[:26])


def test_round_closes_carry_forward_without_trades():
    result = fundamental_session(AssetConfig(n_fundamental=2, estimates=(90.0, 110.0), rounds=3, steps_per_round=1))
    assert result.closes[0] == 100.0


def test_config_validation():
    with pytest.raises(ValueError):
        AssetConfig(n_speculators=3, credit=(100.0,), rounds=2)
    with pytest.raises(ValueError):
        AssetConfig(rounds=0)
    with pytest.raises(ValueError):
        AssetConfig(tick=-0.01)
    with pytest.raises(ValueError):
        AssetConfig(n_fundamental=3, estimates=(1.0,))


def test_sessions_need_enough_traders():
    with pytest.raises(EmptyMarket):
        fundamental_session(AssetConfig(n_fundamental=1))
    with pytest.raises(EmptyMarket):
        speculative_session(AssetConfig())


def test_tail_summary_reports_none_when_undefined():
    summary = tail_summary([0.0, 0.0, 0.0])
    assert summary == {"kurtosis": None, "hill_alpha": None, "acf_abs": {"1": None, "5": None, "10": None}}
    full = tail_summary(speculative_session(spec_config(0)).returns)
    assert set(full) == {"kurtosis", "hill_alpha", "acf_abs"}
    assert full["kurtosis"] is not None
