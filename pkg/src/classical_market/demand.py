"""Trader populations built from economic primitives.

A buyer is described by two draws: wealth, and the share of it they would
pay for one unit of the good. Their reservation price is the product.
Sellers draw costs i.i.d.

Randomness
----------
Every draw comes from numpy's PCG64 bit generator seeded through
``numpy.random.SeedSequence(seed, spawn_key=(stream,))``, one stream per
random quantity (see ``WEALTH_STREAM`` and friends). Within a stream, trader
``i`` receives the ``i``-th variate, so a trader's draw does not depend on
how many traders follow it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Population, Side, UnitValuation, demand_curve, max_normalized_step
from .errors import InvalidSpec

__all__ = [
    "DistributionSpec",
    "GarnierSpec",
    "WEALTH_STREAM",
    "FRACTION_STREAM",
    "COST_STREAM",
    "stream_rng",
    "garnier_population",
    "cost_population",
    "law_of_demand_report",
]

WEALTH_STREAM = 0
FRACTION_STREAM = 1
COST_STREAM = 2

_PARAMS = {
    "uniform": ("a", "b"),
    "triangular": ("a", "mode", "b"),
    "pareto": ("x_min", "alpha"),
    "lognormal": ("mu", "sigma"),
}


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Generator for one named stream of a 64-bit scenario seed."""
    if not 0 <= seed < 2**64:
        raise InvalidSpec(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class DistributionSpec:
    """A nonnegative continuous distribution.

    ``kind`` is one of ``uniform(a, b)``, ``triangular(a, mode, b)``,
    ``pareto(x_min, alpha)`` (classical Pareto, support ``[x_min, inf)``) or
    ``lognormal(mu, sigma)``. A uniform with ``a == b`` is accepted as a
    point mass.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        if self.kind not in _PARAMS:
            raise InvalidSpec(f"unknown distribution kind {self.kind!r}")
        names = _PARAMS[self.kind]
        if len(self.params) != len(names):
            raise InvalidSpec(f"{self.kind} takes parameters {names}, got {self.params}")
        if not all(math.isfinite(x) for x in self.params):
            raise InvalidSpec(f"{self.kind} parameters must be finite")
        p = self.params
        if self.kind == "uniform":
            if p[0] < 0 or p[0] > p[1]:
                raise InvalidSpec(f"uniform needs 0 <= a <= b, got {p}")
        elif self.kind == "triangular":
            if p[0] < 0 or not (p[0] <= p[1] <= p[2]) or p[0] == p[2]:
                raise InvalidSpec(f"triangular needs 0 <= a <= mode <= b and a < b, got {p}")
        elif self.kind == "pareto":
            if p[0] <= 0 or p[1] <= 0:
                raise InvalidSpec(f"pareto needs x_min > 0 and alpha > 0, got {p}")
        elif p[1] <= 0:
            raise InvalidSpec(f"lognormal needs sigma > 0, got {p}")

    @classmethod
    def uniform(cls, a, b):
        return cls("uniform", (a, b))

    @classmethod
    def triangular(cls, a, mode, b):
        return cls("triangular", (a, mode, b))

    @classmethod
    def pareto(cls, x_min, alpha):
        return cls("pareto", (x_min, alpha))

    @classmethod
    def lognormal(cls, mu, sigma):
        return cls("lognormal", (mu, sigma))

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        d = dict(d)
        kind = d.pop("kind")
        names = _PARAMS.get(kind)
        if names is None:
            raise InvalidSpec(f"unknown distribution kind {kind!r}")
        missing = [n for n in names if n not in d]
        extra = sorted(set(d) - set(names))
        if missing or extra:
            raise InvalidSpec(f"{kind}: missing {missing}, unexpected {extra}")
        return cls(kind, tuple(d[n] for n in names))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **dict(zip(_PARAMS[self.kind], self.params))}

    @property
    def support(self) -> tuple[float, float]:
        p = self.params
        if self.kind == "uniform":
            return p[0], p[1]
        if self.kind == "triangular":
            return p[0], p[2]
        if self.kind == "pareto":
            return p[0], math.inf
        return 0.0, math.inf

    @property
    def mean(self) -> float:
        p = self.params
        if self.kind == "uniform":
            return (p[0] + p[1]) / 2
        if self.kind == "triangular":
            return sum(p) / 3
        if self.kind == "pareto":
            return math.inf if p[1] <= 1 else p[1] * p[0] / (p[1] - 1)
        return math.exp(p[0] + p[1] ** 2 / 2)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        p = self.params
        if self.kind == "uniform":
            return rng.uniform(p[0], p[1], n) if p[0] < p[1] else np.full(n, p[0])
        if self.kind == "triangular":
            return rng.triangular(p[0], p[1], p[2], n)
        if self.kind == "pareto":
            # numpy's pareto is the Lomax form; shift and scale to classical Pareto
            return p[0] * (1.0 + rng.pareto(p[1], n))
        return rng.lognormal(p[0], p[1], n)


@dataclass(frozen=True)
class GarnierSpec:
    """Buyers whose willingness to pay is ``fraction * wealth``.

    ``fraction`` is either a constant in ``(0, 1]`` or a distribution whose
    support lies in ``[0, 1]``.
    """

    wealth: DistributionSpec
    n: int
    seed: int
    fraction: Union[float, DistributionSpec] = 1.0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidSpec(f"n must be a positive integer, got {self.n!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidSpec(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if isinstance(self.fraction, DistributionSpec):
            lo, hi = self.fraction.support
            if lo < 0 or hi > 1:
                raise InvalidSpec(f"fraction support {lo, hi} is not inside [0, 1]")
        elif not (0 < self.fraction <= 1):
            raise InvalidSpec(f"constant fraction must lie in (0, 1], got {self.fraction}")


def _buyers_from(limits) -> tuple:
    return tuple(UnitValuation(Side.BUYER, float(x), 1) for x in limits)


def garnier_population(spec: GarnierSpec) -> Population:
    """One single-unit buyer per draw, limit ``fraction_i * wealth_i``."""
    wealth = spec.wealth.sample(stream_rng(spec.seed, WEALTH_STREAM), spec.n)
    if isinstance(spec.fraction, DistributionSpec):
        frac = spec.fraction.sample(stream_rng(spec.seed, FRACTION_STREAM), spec.n)
    else:
        frac = np.full(spec.n, float(spec.fraction))
    return Population(buyers=_buyers_from(frac * wealth))


def cost_population(dist: DistributionSpec, n: int, seed: int) -> Population:
    """``n`` single-unit sellers with i.i.d. costs drawn from ``dist``."""
    if not isinstance(n, int) or n < 0:
        raise InvalidSpec(f"n must be a nonnegative integer, got {n!r}")
    costs = dist.sample(stream_rng(seed, COST_STREAM), n)
    return Population(sellers=tuple(UnitValuation(Side.SELLER, float(c), 1) for c in costs))


def law_of_demand_report(pop: Population) -> dict:
    """Check that aggregate demand slopes down and measure its largest step.

    Returns ``{"is_monotone": bool, "max_step": float, "n": int}`` where
    ``max_step`` is the largest jump of the demand curve as a share of all
    buyer units; it shrinks as more buyers are aggregated.
    """
    if not pop.buyers:
        raise ValueError("law of demand needs at least one buyer")
    curve = demand_curve(pop)
    q = [c for _, c in curve.breakpoints]
    return {
        "is_monotone": all(a >= b for a, b in zip(q, q[1:])),
        "max_step": max_normalized_step(curve),
        "n": pop.buyer_quantity,
    }
