"""Asset markets: fundamental investors versus trend-following speculators.

Every round is one double-auction trading window on the same institution
as ``classical_market.auction``. Fundamental investors hold an estimate of
the asset's intrinsic value and, each round, are willing to buy one unit
below it and sell one unit above it. Speculators form an extrapolative
forecast from past round-close prices and trade in its direction; their
purchases within a round are capped by that round's credit line.

The round-close price is the last trade of the round. A round without
trades carries the previous close forward; before the first trade the
reference close is the intrinsic value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .auction import AdaptiveConcession, OrderBook, Outcome, PublicView, Quote, _Context, to_ticks
from .core import Population, Side, UnitValuation
from .demand import stream_rng
from .errors import EmptyMarket, InsufficientData
from .tails import acf_abs, excess_kurtosis, hill_estimator, log_returns

__all__ = [
    "FundamentalTrader",
    "Speculator",
    "AssetConfig",
    "AssetResult",
    "Reservation",
    "speculator_reservation",
    "draw_estimates",
    "induced_population",
    "fundamental_session",
    "speculative_session",
    "tail_summary",
    "credit_ramp",
]

ESTIMATE_STREAM = 4
ASSET_STREAM = 5


@dataclass
class FundamentalTrader:
    id: str
    estimate: float
    endowment: int = 20
    cash: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise ValueError(f"estimate must be finite, got {self.estimate}")


@dataclass
class Speculator:
    """Trend follower with forecast ``p_last + gain * mean(last window changes)``."""

    id: str
    window: int = 1
    gain: float = 1.5
    credit_limit: float = 0.0
    position: int = 0
    cash: float = 0.0
    spent: float = 0.0

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.gain < 0:
            raise ValueError(f"gain must be >= 0, got {self.gain}")


class Reservation(NamedTuple):
    price: float
    side: Optional[Side]  # None means the speculator sits the round out


def speculator_reservation(spec: Speculator, history) -> Reservation:
    """Extrapolated price and trading direction for one speculator.

    The expected change is the mean one-step change over the last
    ``min(window, len(history) - 1)`` steps, and zero with fewer than two
    prices. Positive expected change means buy, negative means sell.
    """
    h = list(history)
    if not h:
        return Reservation(math.nan, None)
    m = min(spec.window, len(h) - 1)
    trend = (h[-1] - h[-1 - m]) / m if m > 0 else 0.0
    price = h[-1] + spec.gain * trend
    if trend > 0:
        return Reservation(price, Side.BUYER)
    if trend < 0:
        return Reservation(price, Side.SELLER)
    return Reservation(price, None)


def credit_ramp(start: float, growth: float, freeze_round: int, rounds: int) -> tuple:
    """Credit that grows by ``growth`` per round, then stays flat from ``freeze_round`` on.

    Round ``r`` (1-based) gets ``start * (1 + growth) ** (min(r, freeze_round) - 1)``.
    """
    if start < 0 or growth < 0 or freeze_round < 1 or rounds < 0:
        raise ValueError("need start >= 0, growth >= 0, freeze_round >= 1 and rounds >= 0")
    return tuple(start * (1 + growth) ** (min(r, freeze_round) - 1) for r in range(1, rounds + 1))


@dataclass(frozen=True)
class AssetConfig:
    """Parameters of one asset-market session.

    ``credit`` lists each speculator's spending cap per round and must have
    one entry per round whenever speculators are present. ``estimates``
    overrides the randomly drawn fundamental estimates (one per fundamental
    trader). Speculator ``j`` uses window ``1 + j % window``.
    """

    intrinsic_value: float = 100.0
    noise_sd: float = 5.0
    n_fundamental: int = 50
    n_speculators: int = 0
    credit: tuple = ()
    rounds: int = 20
    steps_per_round: int = 2000
    tick: float = 0.01
    seed: int = 0
    theta: float = 1.5
    window: int = 1
    eagerness: float = 0.3
    speculator_eagerness: float = 1.0
    margin: float = 0.02
    endowment: int = 60
    estimates: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "credit", tuple(float(c) for c in self.credit))
        if self.estimates is not None:
            object.__setattr__(self, "estimates", tuple(float(e) for e in self.estimates))
            if len(self.estimates) != self.n_fundamental:
                raise ValueError("estimates must have one entry per fundamental trader")
        if self.rounds < 1 or self.steps_per_round < 1:
            raise ValueError("rounds and steps_per_round must be positive")
        if not self.tick > 0:
            raise ValueError("tick must be positive")
        if self.noise_sd < 0 or not self.intrinsic_value > 0:
            raise ValueError("need intrinsic_value > 0 and noise_sd >= 0")
        if self.n_fundamental < 0 or self.n_speculators < 0:
            raise ValueError("trader counts must be nonnegative")
        if self.n_speculators and len(self.credit) != self.rounds:
            raise ValueError(f"credit schedule has {len(self.credit)} entries for {self.rounds} rounds")
        if any(c < 0 for c in self.credit):
            raise ValueError("credit limits must be nonnegative")
        if self.theta < 0 or self.window < 1:
            raise ValueError("need theta >= 0 and window >= 1")


@dataclass
class AssetResult:
    closes: list
    returns: np.ndarray
    trades: list  # (round, time_index, price, buyer_id, seller_id)
    events: list
    estimates: tuple
    spending: list = field(default_factory=list)  # per round: {speculator id: amount spent}

    @property
    def max_price(self) -> float:
        return max(self.closes)


def draw_estimates(config: AssetConfig) -> tuple:
    """Intrinsic value plus i.i.d. Gaussian errors, floored at zero."""
    if config.estimates is not None:
        return config.estimates
    rng = stream_rng(config.seed, ESTIMATE_STREAM)
    e = config.intrinsic_value + config.noise_sd * rng.standard_normal(config.n_fundamental)
    return tuple(float(x) for x in np.maximum(e, 0.0))


def induced_population(estimates) -> Population:
    """Each estimate becomes one buyer unit and one seller unit at that price."""
    return Population(
        tuple(UnitValuation(Side.BUYER, e) for e in estimates),
        tuple(UnitValuation(Side.SELLER, e) for e in estimates),
    )


@dataclass
class _Slot:
    """One side of one trader's activity within a round."""

    id: str
    owner: object
    side: Optional[Side]
    limit: float
    remaining: int = 0
    aspiration: Optional[int] = None
    reference: float = 0.0
    _limit_n: Optional[int] = None

    def limit_ticks(self, tick) -> int:
        if self._limit_n is None:
            self._limit_n = to_ticks(self.limit, tick, self.side)
        n = self._limit_n
        if isinstance(self.owner, Speculator) and self.side is Side.BUYER:
            budget = self.owner.credit_limit - self.owner.spent
            cap = math.floor(budget / tick)
            while cap * tick > budget:
                cap -= 1
            n = min(n, cap)
        return n

    def set_limit(self, side, limit):
        self.side, self.limit, self._limit_n = side, limit, None

    def can_act(self, tick) -> bool:
        o = self.owner
        if self.side is None:
            return False
        if isinstance(o, FundamentalTrader):
            return self.remaining > 0 and (self.side is Side.BUYER or o.endowment > 0)
        if self.side is Side.SELLER:
            return o.position > 0
        # a buyer whose remaining credit no longer covers one unit at the
        # last close is out of the market for the rest of the round
        return o.credit_limit - o.spent >= self.reference and self.limit_ticks(tick) >= 1


def _run(config: AssetConfig) -> AssetResult:
    tick = config.tick
    estimates = draw_estimates(config)
    funds = [FundamentalTrader(f"F{i}", e, config.endowment) for i, e in enumerate(estimates)]
    specs = [Speculator(f"X{j}", 1 + j % config.window, config.theta) for j in range(config.n_speculators)]
    policy = AdaptiveConcession(config.eagerness, config.margin)
    spec_policy = AdaptiveConcession(config.speculator_eagerness, config.margin)
    top = max([config.intrinsic_value, *estimates, *config.credit])
    ctx = _Context(tick, math.floor(4 * top / tick))

    slots = []
    for f in funds:
        slots.append(_Slot(f.id + "b", f, Side.BUYER, f.estimate))
        slots.append(_Slot(f.id + "s", f, Side.SELLER, f.estimate))
    spec_slots = [_Slot(s.id, s, None, math.nan) for s in specs]
    slots.extend(spec_slots)
    by_id = {s.id: s for s in slots}

    rng = stream_rng(config.seed, ASSET_STREAM)
    book = OrderBook(tick)
    closes: list = []
    trades: list = []
    events: list = []
    spending: list = []
    last_trade: Optional[float] = None
    t = 0
    for rnd in range(1, config.rounds + 1):
        book.clear()
        for s in slots:
            s.aspiration = None
            if isinstance(s.owner, FundamentalTrader):
                s.remaining = 1
        for s, slot in zip(specs, spec_slots):
            s.spent = 0.0
            s.credit_limit = config.credit[rnd - 1]
            res = speculator_reservation(s, closes)
            slot.set_limit(res.side, max(res.price, tick) if res.side is not None else math.nan)
            slot.reference = closes[-1] if closes else config.intrinsic_value
        round_close = None
        active = [s for s in slots if s.can_act(tick)]
        for _ in range(config.steps_per_round):
            t += 1
            if not active:
                events.append((t, "idle", "", "", None))
                continue
            slot = active[math.floor(rng.random() * len(active))]
            view = PublicView(
                None if book.best_bid is None else book.best_bid.price,
                None if book.best_ask is None else book.best_ask.price,
                last_trade, t, rnd,
            )
            pol = spec_policy if isinstance(slot.owner, Speculator) else policy
            n = pol.propose(slot, view, ctx, rng)
            price = n * tick
            opposite = book.best_ask if slot.side is Side.BUYER else book.best_bid
            if opposite is not None and by_id[opposite.trader_id].owner is slot.owner:
                crosses = (n >= book.ticks(opposite.price)) if slot.side is Side.BUYER else (n <= book.ticks(opposite.price))
                if crosses:
                    events.append((t, "pass", slot.side.value, slot.id, None))
                    continue
            res = book.submit(Quote(slot.id, slot.side, price, t), rnd)
            if res.outcome is not Outcome.CROSSED:
                events.append((t, res.outcome.value, slot.side.value, slot.id, price))
                continue
            tr = res.trade
            buyer, seller = by_id[tr.buyer_id], by_id[tr.seller_id]
            _settle(buyer, seller, tr.price)
            for s in slots:
                s.aspiration = None
            active = [s for s in slots if s.can_act(tick)]
            last_trade = round_close = tr.price
            trades.append((rnd, t, tr.price, tr.buyer_id, tr.seller_id))
            events.append((t, "trade", slot.side.value, f"{tr.buyer_id}:{tr.seller_id}", tr.price))
        if round_close is None:
            round_close = closes[-1] if closes else config.intrinsic_value
        closes.append(round_close)
        spending.append({s.id: s.spent for s in specs})
    return AssetResult(closes, log_returns(closes), trades, events, estimates, spending)


def _settle(buyer: _Slot, seller: _Slot, price: float):
    b, s = buyer.owner, seller.owner
    if isinstance(b, FundamentalTrader):
        b.endowment += 1
        buyer.remaining -= 1
    else:
        b.position += 1
        b.spent += price
    b.cash -= price
    if isinstance(s, FundamentalTrader):
        s.endowment -= 1
        seller.remaining -= 1
    else:
        s.position -= 1
    s.cash += price


def fundamental_session(config: AssetConfig) -> AssetResult:
    """Rounds of trading among fundamental investors only.

    Speculator settings in ``config`` are ignored.

    Raises:
        EmptyMarket: with fewer than two fundamental traders.
    """
    if config.n_fundamental < 2:
        raise EmptyMarket("a fundamental market needs at least two traders")
    return _run(replace(config, n_speculators=0))


def speculative_session(config: AssetConfig) -> AssetResult:
    """Fundamental investors plus credit-financed trend followers.

    Raises:
        EmptyMarket: without at least one speculator and one fundamental trader.
    """
    if config.n_speculators < 1 or config.n_fundamental < 1:
        raise EmptyMarket("a speculative market needs speculators and fundamental traders")
    return _run(config)


def tail_summary(returns, lags=(1, 5, 10)) -> dict:
    """Kurtosis, Hill exponent at ``k = 5%`` of the sample, and ``|r|`` autocorrelations.

    Statistics that cannot be computed for this sample are reported as ``None``.
    """
    r = np.asarray(returns, dtype=float)

    def attempt(fn, *args):
        try:
            return fn(*args)
        except InsufficientData:
            return None

    return {
        "kurtosis": attempt(excess_kurtosis, r),
        "hill_alpha": attempt(hill_estimator, r, max(1, int(0.05 * r.size))),
        "acf_abs": {str(lag): attempt(acf_abs, r, lag) for lag in lags},
    }
