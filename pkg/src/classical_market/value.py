"""Potential rent and the center of value.

The potential rent at a price ``p`` is the total surplus every in-the-money
trader would collect if the whole market traded at ``p``::

    rent(p) = sum_b q_b * max(v_b - p, 0) + sum_s q_s * max(p - c_s, 0)

It is convex and piecewise linear with knots at the limits, and its slope on
any open segment equals excess supply there. Its minimizer, a quantity
weighted median of all limits, is the center of value. Competition drives
the price there; ``excess_rent`` measures how far a price still is from it.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .core import Population, PriceInterval
from .errors import EmptyMarket

__all__ = [
    "RentProfile",
    "potential_rent",
    "rent_profile",
    "center_of_value",
    "min_rent",
    "excess_rent",
]


def potential_rent(pop: Population, p):
    total = 0
    for u in pop.buyers:
        if u.limit > p:
            total += u.quantity * (u.limit - p)
    for u in pop.sellers:
        if u.limit < p:
            total += u.quantity * (p - u.limit)
    return total


@dataclass(frozen=True)
class RentProfile:
    """Knots of the rent function and the slopes between them.

    ``slopes`` has one more entry than ``knots``: ``slopes[0]`` applies left of
    the first knot and ``slopes[i]`` between ``knots[i-1]`` and ``knots[i]``.
    """

    knots: tuple  # (price, rent) pairs
    slopes: tuple

    def __post_init__(self):
        if any(a > b for a, b in zip(self.slopes, self.slopes[1:])):
            raise ValueError("rent slopes must be nondecreasing")

    def __call__(self, p):
        prices = [k for k, _ in self.knots]
        i = bisect.bisect_right(prices, p)
        if i == 0:
            k, r = self.knots[0]
            return r + self.slopes[0] * (p - k)
        k, r = self.knots[i - 1]
        return r + self.slopes[i] * (p - k)


def rent_profile(pop: Population) -> RentProfile:
    """Single sorted sweep over the limits building knot values and slopes."""
    if pop.is_empty:
        raise EmptyMarket("rent profile of an empty market")
    weight: dict = {}
    for u in pop.buyers + pop.sellers:
        weight[u.limit] = weight.get(u.limit, 0) + u.quantity
    prices = sorted(weight)
    slope = -pop.buyer_quantity
    slopes = [slope]
    rent = potential_rent(pop, prices[0])
    knots = [(prices[0], rent)]
    for i, price in enumerate(prices):
        slope += weight[price]
        slopes.append(slope)
        if i + 1 < len(prices):
            nxt = prices[i + 1]
            rent = rent + slope * (nxt - price)
            knots.append((nxt, rent))
    return RentProfile(tuple(knots), tuple(slopes))


def _argmin_knots(pop: Population):
    weight: dict = {}
    for u in pop.buyers + pop.sellers:
        weight[u.limit] = weight.get(u.limit, 0) + u.quantity
    prices = sorted(weight)
    low = high = None
    slope = -pop.buyer_quantity
    for price in prices:
        left = slope
        slope += weight[price]
        if low is None and slope >= 0:
            low = price
        if left <= 0:
            high = price
    return low, high


def center_of_value(pop: Population) -> PriceInterval:
    """The set of prices minimizing potential rent.

    A knot belongs to the set when the slope on its left is ``<= 0`` and the
    slope on its right is ``>= 0``; the set is the closed interval between the
    first and last such knots. With only one side present the rent is flat
    beyond the extreme limit, and the interval collapses onto that limit.

    Raises:
        EmptyMarket: if there are no traders at all.
    """
    if pop.is_empty:
        raise EmptyMarket("center of value of an empty market")
    low, high = _argmin_knots(pop)
    return PriceInterval(low, high)


def min_rent(pop: Population):
    return potential_rent(pop, center_of_value(pop).low)


def excess_rent(pop: Population, p):
    """Rent at ``p`` above its minimum; zero exactly on the center of value."""
    return potential_rent(pop, p) - min_rent(pop)
