"""Reservation-price demand and supply.

Market demand at price ``p`` counts the buyer units whose reservation value
is at least ``p``; market supply counts the seller units whose cost is at
most ``p``. Both conventions use weak inequalities, so the set of clearing
prices is always closed and nonempty.

All arithmetic is done on the numbers exactly as given (``int``, ``float``
or ``fractions.Fraction``); nothing here compares with a tolerance.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import math
import os
from dataclasses import dataclass
from numbers import Real
from typing import Iterable, Sequence

from .errors import EmptyMarket

__all__ = [
    "Side",
    "UnitValuation",
    "Population",
    "StepCurve",
    "PriceInterval",
    "demand_at",
    "supply_at",
    "excess_supply",
    "demand_curve",
    "supply_curve",
    "clearing",
    "max_surplus",
    "max_normalized_step",
    "read_population_csv",
    "write_population_csv",
]


class Side(enum.Enum):
    BUYER = "B"
    SELLER = "S"


@dataclass(frozen=True)
class UnitValuation:
    """``quantity`` units valued at ``limit`` by one trader.

    For a buyer the limit is the use-value (maximum willingness to pay); for a
    seller it is the cost (minimum acceptable price).
    """

    side: Side
    limit: Real
    quantity: int = 1

    def __post_init__(self):
        if not isinstance(self.side, Side):
            raise ValueError(f"side must be a Side, got {self.side!r}")
        if isinstance(self.limit, bool) or not isinstance(self.limit, Real):
            raise ValueError(f"limit must be a real number, got {self.limit!r}")
        if not math.isfinite(self.limit) or self.limit < 0:
            raise ValueError(f"limit must be finite and >= 0, got {self.limit!r}")
        if isinstance(self.quantity, bool) or not isinstance(self.quantity, int):
            raise ValueError(f"quantity must be an integer, got {self.quantity!r}")
        if self.quantity < 1:
            raise ValueError(f"quantity must be >= 1, got {self.quantity}")


def _as_units(side: Side, items) -> tuple[UnitValuation, ...]:
    out = []
    for item in items:
        if isinstance(item, UnitValuation):
            out.append(item)
        elif isinstance(item, tuple):
            out.append(UnitValuation(side, *item))
        else:
            out.append(UnitValuation(side, item))
    return tuple(out)


@dataclass(frozen=True)
class Population:
    """Buyers and sellers of one market. Either side may be empty."""

    buyers: tuple[UnitValuation, ...] = ()
    sellers: tuple[UnitValuation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "buyers", tuple(self.buyers))
        object.__setattr__(self, "sellers", tuple(self.sellers))
        for u in self.buyers:
            if u.side is not Side.BUYER:
                raise ValueError(f"seller unit {u} in buyer list")
        for u in self.sellers:
            if u.side is not Side.SELLER:
                raise ValueError(f"buyer unit {u} in seller list")

    @classmethod
    def from_limits(cls, buyers: Iterable = (), sellers: Iterable = ()) -> "Population":
        """Build a population from bare limits or ``(limit, quantity)`` tuples.

        >>> Population.from_limits([10, 8, 6], [(5, 2)]).seller_quantity
        2
        """
        return cls(_as_units(Side.BUYER, buyers), _as_units(Side.SELLER, sellers))

    @property
    def buyer_quantity(self) -> int:
        return sum(u.quantity for u in self.buyers)

    @property
    def seller_quantity(self) -> int:
        return sum(u.quantity for u in self.sellers)

    @property
    def is_empty(self) -> bool:
        return not self.buyers and not self.sellers

    def limits(self) -> list:
        """Sorted distinct limits across both sides."""
        return sorted({u.limit for u in self.buyers} | {u.limit for u in self.sellers})

    def shifted(self, delta) -> "Population":
        return Population(
            tuple(UnitValuation(u.side, u.limit + delta, u.quantity) for u in self.buyers),
            tuple(UnitValuation(u.side, u.limit + delta, u.quantity) for u in self.sellers),
        )

    def scaled(self, factor) -> "Population":
        return Population(
            tuple(UnitValuation(u.side, u.limit * factor, u.quantity) for u in self.buyers),
            tuple(UnitValuation(u.side, u.limit * factor, u.quantity) for u in self.sellers),
        )


@dataclass(frozen=True)
class PriceInterval:
    low: Real
    high: Real

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValueError(f"interval endpoints must be finite: [{self.low}, {self.high}]")
        if self.low > self.high:
            raise ValueError(f"empty interval: [{self.low}, {self.high}]")

    def __contains__(self, p) -> bool:
        return self.low <= p <= self.high

    @property
    def midpoint(self):
        return (self.low + self.high) / 2

    def distance(self, p):
        """Distance from ``p`` to the interval (0 inside)."""
        if p < self.low:
            return self.low - p
        if p > self.high:
            return p - self.high
        return 0


class CurveKind(enum.Enum):
    DEMAND = "demand"
    SUPPLY = "supply"


@dataclass(frozen=True)
class StepCurve:
    """Empirical demand or supply as a step function of price.

    ``breakpoints`` is a tuple of ``(price, cumulative_quantity)`` sorted by
    price, one entry per distinct limit. For demand the cumulative quantity
    at a breakpoint is the number of units valued at or above that price;
    for supply, the number of units costing at most that price.
    """

    breakpoints: tuple[tuple[Real, int], ...]
    direction: CurveKind

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(tuple(b) for b in self.breakpoints))
        prices = [p for p, _ in self.breakpoints]
        if any(a >= b for a, b in zip(prices, prices[1:])):
            raise ValueError("breakpoint prices must be strictly increasing")
        q = [c for _, c in self.breakpoints]
        if self.direction is CurveKind.DEMAND:
            ok = all(a > b for a, b in zip(q, q[1:]))
        else:
            ok = all(a < b for a, b in zip(q, q[1:]))
        if not ok or any(c < 1 for c in q):
            raise ValueError(f"cumulative quantities are not a valid {self.direction.value} curve")

    @property
    def prices(self) -> list:
        return [p for p, _ in self.breakpoints]

    @property
    def total_quantity(self) -> int:
        if not self.breakpoints:
            return 0
        idx = 0 if self.direction is CurveKind.DEMAND else -1
        return self.breakpoints[idx][1]

    def __call__(self, p) -> int:
        prices = self.prices
        if self.direction is CurveKind.DEMAND:
            i = bisect.bisect_left(prices, p)
            return self.breakpoints[i][1] if i < len(prices) else 0
        i = bisect.bisect_right(prices, p) - 1
        return self.breakpoints[i][1] if i >= 0 else 0

    def jumps(self) -> list[int]:
        """Quantity added or removed at each breakpoint, in price order."""
        q = [c for _, c in self.breakpoints]
        if self.direction is CurveKind.DEMAND:
            return [a - b for a, b in zip(q, q[1:] + [0])]
        return [b - a for a, b in zip([0] + q[:-1], q)]


def demand_at(pop: Population, p) -> int:
    """Units demanded at ``p``: buyer units with value ``>= p``."""
    return sum(u.quantity for u in pop.buyers if u.limit >= p)


def supply_at(pop: Population, p) -> int:
    """Units supplied at ``p``: seller units with cost ``<= p``."""
    return sum(u.quantity for u in pop.sellers if u.limit <= p)


def excess_supply(pop: Population, p) -> int:
    return supply_at(pop, p) - demand_at(pop, p)


def _tally(units: Sequence[UnitValuation]) -> dict:
    counts: dict = {}
    for u in units:
        counts[u.limit] = counts.get(u.limit, 0) + u.quantity
    return counts


def demand_curve(pop: Population) -> StepCurve:
    counts = _tally(pop.buyers)
    points = []
    running = 0
    for price in sorted(counts, reverse=True):
        running += counts[price]
        points.append((price, running))
    return StepCurve(tuple(reversed(points)), CurveKind.DEMAND)


def supply_curve(pop: Population) -> StepCurve:
    counts = _tally(pop.sellers)
    points = []
    running = 0
    for price in sorted(counts):
        running += counts[price]
        points.append((price, running))
    return StepCurve(tuple(points), CurveKind.SUPPLY)


def _order_stat(ladder: list, k: int):
    """k-th unit (1-based) of a ``[(limit, qty), ...]`` ladder, or None past the end."""
    if k < 1:
        return None
    seen = 0
    for limit, qty in ladder:
        seen += qty
        if seen >= k:
            return limit
    return None


def clearing(pop: Population) -> tuple[PriceInterval, int]:
    """Competitive-equilibrium price interval and traded quantity.

    Units are ranked Marshall-style: buyer values from high to low, seller
    costs from low to high. The cleared quantity ``q`` is the largest rank at
    which the ``q``-th value still covers the ``q``-th cost, and the price set
    is bounded by the marginal and first excluded units on each side::

        [max(c_q, v_{q+1}), min(v_q, c_{q+1})]

    When one side is empty the unbounded end is closed at the other end,
    which gives the degenerate interval at the best remaining limit.

    Raises:
        EmptyMarket: if there are no traders at all.
    """
    if pop.is_empty:
        raise EmptyMarket("cannot clear a market with no buyers and no sellers")
    values = sorted(((u.limit, u.quantity) for u in pop.buyers), key=lambda t: t[0], reverse=True)
    costs = sorted(((u.limit, u.quantity) for u in pop.sellers), key=lambda t: t[0])

    # largest q with v_q >= c_q, found by walking both ladders together
    q = 0
    i = j = 0
    left_v = values[0][1] if values else 0
    left_c = costs[0][1] if costs else 0
    while i < len(values) and j < len(costs) and values[i][0] >= costs[j][0]:
        step = min(left_v, left_c)
        q += step
        left_v -= step
        left_c -= step
        if left_v == 0:
            i += 1
            left_v = values[i][1] if i < len(values) else 0
        if left_c == 0:
            j += 1
            left_c = costs[j][1] if j < len(costs) else 0

    candidates_low = [x for x in (_order_stat(costs, q), _order_stat(values, q + 1)) if x is not None]
    candidates_high = [x for x in (_order_stat(values, q), _order_stat(costs, q + 1)) if x is not None]
    low = max(candidates_low) if candidates_low else None
    high = min(candidates_high) if candidates_high else None
    if low is None:
        low = high
    if high is None:
        high = low
    return PriceInterval(low, high), q


def max_surplus(pop: Population):
    """Largest total gains from trade: best values paired with lowest costs."""
    values = sorted(((u.limit, u.quantity) for u in pop.buyers), key=lambda t: t[0], reverse=True)
    costs = sorted(((u.limit, u.quantity) for u in pop.sellers), key=lambda t: t[0])
    total = 0
    i = j = 0
    left_v = values[0][1] if values else 0
    left_c = costs[0][1] if costs else 0
    while i < len(values) and j < len(costs) and values[i][0] >= costs[j][0]:
        step = min(left_v, left_c)
        total += step * (values[i][0] - costs[j][0])
        left_v -= step
        left_c -= step
        if left_v == 0:
            i += 1
            left_v = values[i][1] if i < len(values) else 0
        if left_c == 0:
            j += 1
            left_c = costs[j][1] if j < len(costs) else 0
    return total


def max_normalized_step(curve: StepCurve) -> float:
    """Largest single jump of ``curve`` as a fraction of its total quantity."""
    if not curve.breakpoints:
        raise ValueError("curve has no breakpoints")
    return max(curve.jumps()) / curve.total_quantity


def _parse_limit(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_population_csv(source) -> Population:
    """Read a ``side,limit,quantity`` CSV (side is ``B`` or ``S``).

    ``source`` may be a path or an open text stream. Integer-looking limits
    are kept as ``int`` so that downstream arithmetic stays exact.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, newline="") as fh:
            return read_population_csv(fh)
    reader = csv.DictReader(source)
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["side", "limit", "quantity"]:
        raise ValueError(f"expected header side,limit,quantity, got {reader.fieldnames}")
    buyers, sellers = [], []
    for lineno, row in enumerate(reader, start=2):
        side = row["side"].strip()
        try:
            unit = UnitValuation(Side(side), _parse_limit(row["limit"]), int(row["quantity"]))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        (buyers if unit.side is Side.BUYER else sellers).append(unit)
    return Population(tuple(buyers), tuple(sellers))


def format_number(x) -> str:
    """Fixed 9-significant-digit rendering used by every written artifact."""
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".9g")


def write_population_csv(pop: Population, dest=None) -> str:
    """Serialize ``pop``; writes to ``dest`` (path or stream) and returns the text."""
    buf = io.StringIO()
    buf.write("side,limit,quantity\n")
    for u in pop.buyers + pop.sellers:
        buf.write(f"{u.side.value},{format_number(u.limit)},{u.quantity}\n")
    text = buf.getvalue()
    if dest is None:
        return text
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)
    return text
