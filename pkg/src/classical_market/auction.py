"""Continuous double auction with outbid/undersell traders.

The book keeps only the best bid and the best ask. A new bid must beat the
standing bid (a new ask must undercut the standing ask); a quote that meets
or crosses the opposite side trades at the standing quote's price, after
which the book is emptied. All prices live on a tick grid and comparisons
are done on integer tick counts.

Traders only see public information (see ``PublicView``): the standing
quotes and past trade prices. Their own reservation prices are private.

Two quoting policies are provided:

``ZIC``
    Zero-intelligence constrained: a uniform draw over the no-loss range,
    ``[0, value]`` for buyers and ``[cost, p_max]`` for sellers.
``AdaptiveConcession``
    Opens at a margin away from the last public trade price (or from its own
    limit before any trade), then after every attempt that does not trade
    moves a fraction ``eagerness`` of the way toward the opposing best quote,
    never past its own limit. With no opposing quote it holds its price.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Union

import numpy as np

from .core import Population, Side, max_surplus
from .demand import stream_rng
from .errors import EmptyMarket, NoTrades, StaleQuote, ZeroSurplus
from .value import center_of_value

__all__ = [
    "Quote",
    "Trade",
    "Outcome",
    "SubmitResult",
    "OrderBook",
    "submit",
    "PublicView",
    "ZIC",
    "AdaptiveConcession",
    "TraderAgent",
    "SessionConfig",
    "SessionResult",
    "Session",
    "step",
    "run_session",
    "efficiency",
    "alpha",
    "to_ticks",
]

AUCTION_STREAM = 3


def to_ticks(price, tick, side: Side) -> int:
    """Round a limit onto the tick grid without making it more generous.

    Buyers round down and sellers round up, and the result is nudged by one
    tick if float error put ``n * tick`` on the wrong side of ``price``.
    """
    if side is Side.BUYER:
        n = math.floor(price / tick)
        while n * tick > price:
            n -= 1
    else:
        n = math.ceil(price / tick)
        while n * tick < price:
            n += 1
    return n


class Quote(NamedTuple):
    trader_id: str
    side: Side
    price: float
    time_index: int

    @classmethod
    def checked(cls, trader_id, side, price, time_index) -> "Quote":
        if not math.isfinite(price) or price < 0:
            raise ValueError(f"quote price must be finite and >= 0, got {price}")
        return cls(trader_id, side, price, time_index)


@dataclass(frozen=True)
class Trade:
    price: float
    buyer_id: str
    seller_id: str
    time_index: int
    period: int = 0
    buyer_value: Optional[float] = None
    seller_cost: Optional[float] = None

    @property
    def surplus(self):
        return self.buyer_value - self.seller_cost


class Outcome(enum.Enum):
    ACCEPTED = "accepted"
    REJECTED = "rejected"
    CROSSED = "crossed"


class SubmitResult(NamedTuple):
    outcome: Outcome
    trade: Optional[Trade] = None


_ACCEPTED = SubmitResult(Outcome.ACCEPTED)
_REJECTED = SubmitResult(Outcome.REJECTED)


@dataclass
class OrderBook:
    """Best bid and best ask of an oral double auction.

    Invariant: when both quotes exist, ``best_bid.price < best_ask.price``.
    """

    tick: float = 0.01
    best_bid: Optional[Quote] = None
    best_ask: Optional[Quote] = None
    last_time: int = -1

    def __post_init__(self):
        self._bid_n = None if self.best_bid is None else self.ticks(self.best_bid.price)
        self._ask_n = None if self.best_ask is None else self.ticks(self.best_ask.price)

    def ticks(self, price) -> int:
        return round(price / self.tick)

    def clear(self):
        self.best_bid = self.best_ask = None
        self._bid_n = self._ask_n = None

    def submit(self, quote: Quote, period: int = 0) -> SubmitResult:
        if quote.time_index <= self.last_time:
            raise StaleQuote(f"time index {quote.time_index} after {self.last_time}")
        self.last_time = quote.time_index
        n = self.ticks(quote.price)
        if quote.side is Side.BUYER:
            if self._ask_n is not None and n >= self._ask_n:
                trade = Trade(self.best_ask.price, quote.trader_id, self.best_ask.trader_id,
                              quote.time_index, period)
                self.clear()
                return SubmitResult(Outcome.CROSSED, trade)
            if self._bid_n is None or n > self._bid_n:
                self.best_bid, self._bid_n = quote, n
                return _ACCEPTED
            return _REJECTED
        if self._bid_n is not None and n <= self._bid_n:
            trade = Trade(self.best_bid.price, self.best_bid.trader_id, quote.trader_id,
                          quote.time_index, period)
            self.clear()
            return SubmitResult(Outcome.CROSSED, trade)
        if self._ask_n is None or n < self._ask_n:
            self.best_ask, self._ask_n = quote, n
            return _ACCEPTED
        return _REJECTED


def submit(book: OrderBook, quote: Quote, tick: Optional[float] = None, period: int = 0) -> SubmitResult:
    """Apply the improvement rule to ``quote``; mutates ``book``."""
    if not math.isfinite(quote.price) or quote.price < 0:
        raise ValueError(f"quote price must be finite and >= 0, got {quote.price}")
    if tick is not None:
        book.tick = tick
    return book.submit(quote, period)


class PublicView(NamedTuple):
    """Everything a trader may observe. No field carries another trader's limit."""

    best_bid: Optional[float]
    best_ask: Optional[float]
    last_trade: Optional[float]
    time_index: int
    period: int


@dataclass(frozen=True)
class ZIC:
    """Uniform random quotes inside the trader's no-loss range."""

    name = "zic"

    def propose(self, agent, view, ctx, rng) -> Optional[int]:
        limit = agent.limit_ticks(ctx.tick)
        if agent.side is Side.BUYER:
            return min(limit, math.floor(rng.random() * (limit + 1)))
        top = ctx.p_max_ticks
        if limit > top:
            return None
        return limit + min(top - limit, math.floor(rng.random() * (top - limit + 1)))

    def reset(self, agent):
        pass


@dataclass(frozen=True)
class AdaptiveConcession:
    """Open away from the market, then concede toward the other side.

    Args:
        eagerness: fraction of the gap to the opposing best quote closed
            after each attempt that does not trade, at least one tick. When
            the other side of the book is empty the quote is repeated.
        margin: opening distance from the reference price, as a fraction of
            it. Before any trade the reference is the trader's own limit;
            afterwards it is the last public trade price, capped by the limit.
    """

    eagerness: float = 0.2
    margin: float = 0.2
    name = "adaptive"

    def __post_init__(self):
        if not 0 < self.eagerness <= 1:
            raise ValueError(f"eagerness must lie in (0, 1], got {self.eagerness}")
        if not 0 <= self.margin < 1:
            raise ValueError(f"margin must lie in [0, 1), got {self.margin}")

    def opening(self, side, limit, anchor, p_max_ticks) -> int:
        if side is Side.BUYER:
            ref = limit if anchor is None else min(limit, anchor)
            return max(0, math.floor(ref * (1 - self.margin)))
        ref = limit if anchor is None else max(limit, anchor)
        return max(limit, min(p_max_ticks, math.ceil(ref * (1 + self.margin))))

    def concede(self, side, current, limit, opposing) -> int:
        # with nothing to concede toward, hold (an outlier limit is never a target)
        if side is Side.BUYER:
            if opposing is None or min(limit, opposing) <= current:
                return min(current, limit)
            target = min(limit, opposing)
            return min(target, current + max(1, math.ceil(self.eagerness * (target - current))))
        if opposing is None or max(limit, opposing) >= current:
            return max(current, limit)
        target = max(limit, opposing)
        return max(target, current - max(1, math.ceil(self.eagerness * (current - target))))

    def propose(self, agent, view, ctx, rng) -> Optional[int]:
        limit = agent.limit_ticks(ctx.tick)
        if agent.aspiration is None:
            anchor = None if view.last_trade is None else round(view.last_trade / ctx.tick)
            agent.aspiration = self.opening(agent.side, limit, anchor, ctx.p_max_ticks)
        else:
            if agent.side is Side.BUYER:
                opp = None if view.best_ask is None else round(view.best_ask / ctx.tick)
            else:
                opp = None if view.best_bid is None else round(view.best_bid / ctx.tick)
            agent.aspiration = self.concede(agent.side, agent.aspiration, limit, opp)
        return agent.aspiration

    def reset(self, agent):
        agent.aspiration = None


Policy = Union[ZIC, AdaptiveConcession]


@dataclass
class TraderAgent:
    """A trader with private per-unit limits, traded in order.

    Buyers hold their values in descending order and sellers their costs in
    ascending order, so the most profitable unit is always offered first.
    """

    id: str
    side: Side
    unit_limits: tuple
    policy: Policy
    next_unit: int = 0
    aspiration: Optional[int] = None

    def __post_init__(self):
        self.unit_limits = tuple(sorted(self.unit_limits, reverse=self.side is Side.BUYER))

    @property
    def has_units(self) -> bool:
        return self.next_unit < len(self.unit_limits)

    @property
    def current_limit(self):
        return self.unit_limits[self.next_unit]

    def limit_ticks(self, tick) -> int:
        return to_ticks(self.current_limit, tick, self.side)

    def reset(self):
        self.next_unit = 0
        self.policy.reset(self)


@dataclass(frozen=True)
class SessionConfig:
    periods: int = 5
    steps_per_period: int = 1000
    tick: float = 0.01
    policy: str = "zic"
    eagerness: float = 0.2
    margin: float = 0.2
    seed: int = 0
    p_max: Optional[float] = None

    def __post_init__(self):
        if self.periods < 1 or self.steps_per_period < 1:
            raise ValueError("periods and steps_per_period must be positive")
        if not self.tick > 0:
            raise ValueError(f"tick must be positive, got {self.tick}")
        if self.policy not in ("zic", "adaptive"):
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.p_max is not None and not self.p_max > 0:
            raise ValueError("p_max must be positive")

    def make_policy(self) -> Policy:
        if self.policy == "zic":
            return ZIC()
        return AdaptiveConcession(self.eagerness, self.margin)


@dataclass(frozen=True)
class _Context:
    tick: float
    p_max_ticks: int


@dataclass
class SessionResult:
    trades: list  # one list of Trade per period
    efficiency: list  # percent per period, None when undefined
    alpha: list  # percent per period, None when a period has no trades
    events: list  # (time_index, type, side, trader, price)

    @property
    def periods(self) -> int:
        return len(self.trades)


class Session:
    """Mutable state of one running double-auction session."""

    def __init__(self, agents, tick=0.01, p_max=None):
        self.agents = list(agents)
        if p_max is None:
            p_max = 2 * max((max(a.unit_limits) for a in self.agents if a.side is Side.BUYER), default=0)
        self.book = OrderBook(tick)
        self.ctx = _Context(tick, math.floor(p_max / tick))
        self.by_id = {a.id: a for a in self.agents}
        self.time_index = 0
        self.period = 0
        self.last_trade: Optional[float] = None
        self.trades: list = []
        self.events: list = []
        self._active = None

    def view(self) -> PublicView:
        b = self.book
        return PublicView(
            None if b.best_bid is None else b.best_bid.price,
            None if b.best_ask is None else b.best_ask.price,
            self.last_trade,
            self.time_index,
            self.period,
        )

    def start_period(self, period: int):
        self.period = period
        self.book.clear()
        for a in self.agents:
            a.reset()
        self._active = None

    def act(self, agent: Optional[TraderAgent], rng) -> Optional[Trade]:
        """Advance time by one event and let ``agent`` (if any) quote."""
        self.time_index += 1
        t = self.time_index
        if agent is None or not agent.has_units:
            self.events.append((t, "idle", "", "" if agent is None else agent.id, None))
            return None
        n = agent.policy.propose(agent, self.view(), self.ctx, rng)
        if n is None:
            self.events.append((t, "pass", agent.side.value, agent.id, None))
            return None
        price = n * self.ctx.tick
        res = self.book.submit(Quote(agent.id, agent.side, price, t), self.period)
        if res.outcome is not Outcome.CROSSED:
            self.events.append((t, res.outcome.value, agent.side.value, agent.id, price))
            return None
        buyer = self.by_id[res.trade.buyer_id]
        seller = self.by_id[res.trade.seller_id]
        trade = replace(res.trade, buyer_value=buyer.current_limit, seller_cost=seller.current_limit)
        for a in (buyer, seller):
            a.next_unit += 1
            a.policy.reset(a)
        self._active = None
        self.last_trade = trade.price
        self.trades.append(trade)
        self.events.append((t, "trade", agent.side.value, f"{buyer.id}:{seller.id}", trade.price))
        return trade

    def step(self, rng: np.random.Generator) -> Optional[Trade]:
        """Pick one trader uniformly among those with units left and let it act."""
        if self._active is None:
            self._active = [a for a in self.agents if a.has_units]
        active = self._active
        agent = active[math.floor(rng.random() * len(active))] if active else None
        return self.act(agent, rng)


def step(state: Session, rng: np.random.Generator) -> Session:
    state.step(rng)
    return state


def agents_from_population(pop: Population, policy: Policy) -> list:
    """One agent per population entry: ``B0, B1, ...`` then ``S0, S1, ...``."""
    agents = []
    for prefix, units in (("B", pop.buyers), ("S", pop.sellers)):
        for i, u in enumerate(units):
            agents.append(TraderAgent(f"{prefix}{i}", u.side, (u.limit,) * u.quantity, policy))
    return agents


def run_session(config: SessionConfig, pop: Population) -> SessionResult:
    """Run ``config.periods`` stationary periods of the double auction.

    Every period re-endows each trader with the same units and empties the
    book; the last trade price carries over as public history.

    Raises:
        EmptyMarket: if either side of ``pop`` is empty.
    """
    if not pop.buyers or not pop.sellers:
        raise EmptyMarket("a double auction needs at least one buyer and one seller")
    rng = stream_rng(config.seed, AUCTION_STREAM)
    session = Session(agents_from_population(pop, config.make_policy()), config.tick, config.p_max)
    per_period = []
    for period in range(1, config.periods + 1):
        session.start_period(period)
        start = len(session.trades)
        for _ in range(config.steps_per_period):
            session.step(rng)
        per_period.append(session.trades[start:])
    result = SessionResult(per_period, [], [], session.events)
    try:
        result.efficiency = efficiency(result, pop)
    except ZeroSurplus:
        result.efficiency = [None] * config.periods
    result.alpha = _alpha_or_none(result, pop)
    return result


def efficiency(result: SessionResult, pop: Population) -> list:
    """Realized surplus as a percentage of the maximum, per period.

    Raises:
        ZeroSurplus: if the population admits no gains from trade.
    """
    best = max_surplus(pop)
    if best <= 0:
        raise ZeroSurplus("efficiency is undefined when no trade is profitable")
    return [100.0 * sum(t.surplus for t in trades) / best for trades in result.trades]


def _alpha_period(prices, interval) -> float:
    if not prices:
        raise NoTrades("alpha needs at least one trade")
    mid = interval.midpoint
    if mid == 0:
        raise ZeroSurplus("alpha is undefined for a center of value at price 0")
    msd = sum(interval.distance(p) ** 2 for p in prices) / len(prices)
    return 100.0 * math.sqrt(msd) / mid


def alpha_from_prices(prices, interval) -> float:
    """RMS distance of ``prices`` from ``interval`` as a percent of its midpoint."""
    return _alpha_period(list(prices), interval)


def alpha(result: SessionResult, pop: Population) -> list:
    """Convergence coefficient per period.

    Raises:
        NoTrades: if any period has no trades (use ``SessionResult.alpha``
            for the per-period ``None`` convention instead).
    """
    interval = center_of_value(pop)
    return [_alpha_period([t.price for t in trades], interval) for trades in result.trades]


def _alpha_or_none(result, pop) -> list:
    interval = center_of_value(pop)
    out = []
    for trades in result.trades:
        try:
            out.append(_alpha_period([t.price for t in trades], interval))
        except (NoTrades, ZeroSurplus):
            out.append(None)
    return out
