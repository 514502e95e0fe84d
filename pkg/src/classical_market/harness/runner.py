"""Dispatch a validated scenario to the library and persist its outputs.

Output contract (column and key names are frozen):

- ``curves``: ``curves.csv`` (price, demand, supply, excess_supply,
  potential_rent) at every distinct limit; summary keys clearing_low,
  clearing_high, cleared_quantity, max_surplus, demand_max_step,
  supply_max_step.
- ``cov``: summary keys low, high, min_rent, cleared_quantity.
- ``garnier``: ``population.csv``; summary keys is_monotone, max_step, n.
- ``auction``: ``events.csv`` (time_index, type, side, trader, price),
  ``periods.csv`` (period, trades, efficiency, alpha); summary keys
  policy, center_low, center_high, max_surplus, mean_efficiency,
  efficiency, alpha.
- ``asset``: ``prices.csv`` (round, close), ``returns.csv`` (round,
  log_return); summary keys mode, kurtosis, hill_alpha, acf_abs,
  max_price, final_close, median_estimate, trades.

Every run ends with ``summary.json`` and then ``manifest.json``. With
``repetitions > 1`` each repetition writes into ``rep_000``, ``rep_001``,
... and repetition ``i`` uses seed ``SeedSequence(seed, spawn_key=(1000, i))``
drawn to 64 bits. Floats are written with 9 significant digits.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import statistics
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__
from ..asset import AssetConfig, fundamental_session, induced_population, speculative_session, tail_summary
from ..auction import SessionConfig, run_session
from ..core import (
    Population,
    clearing,
    demand_curve,
    excess_supply,
    format_number,
    max_normalized_step,
    max_surplus,
    read_population_csv,
    supply_curve,
    write_population_csv,
)
from ..demand import GarnierSpec, cost_population, garnier_population, law_of_demand_report
from ..errors import EmptyMarket, MarketError, ParseError
from ..value import center_of_value, min_rent, potential_rent
from .config import ScenarioConfig, config_hash

__all__ = ["RunManifest", "run", "load_population", "repetition_seed"]

_REPEAT_KEY = 1000


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    version: str
    command: str
    files: list = field(default_factory=list)  # [{"path": ..., "sha256": ...}]
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "files": self.files,
        }


def _num(x):
    """JSON-ready number rounded to 9 significant digits."""
    if x is None or isinstance(x, bool):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, ".9g"))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (int, float, np.integer, np.floating)) and not isinstance(obj, bool):
        return _num(obj)
    return obj


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool):
        return format_number(x.item() if isinstance(x, np.generic) else x)
    return str(x)


class _Writer:
    """Writes files under one directory and remembers their hashes."""

    def __init__(self, root: Path, prefix: str = ""):
        self.root = root
        self.prefix = prefix
        self.files: list = []

    def text(self, name: str, content: str):
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        data = content.encode()
        path.write_bytes(data)
        self.files.append({"path": self.prefix + name, "sha256": hashlib.sha256(data).hexdigest()})

    def csv(self, name: str, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
        self.text(name, buf.getvalue())

    def json(self, name: str, obj):
        self.text(name, json.dumps(_clean(obj), indent=2) + "\n")


def repetition_seed(seed: int, index: int) -> int:
    """Seed of repetition ``index``, derived from the scenario seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(_REPEAT_KEY, index))
    return int(ss.generate_state(1, np.uint64)[0])


def load_population(config: ScenarioConfig, seed: Optional[int] = None) -> Population:
    """Materialize the configured population source.

    Generated populations use ``seed`` (defaults to the scenario seed).
    """
    src = config.population
    if src is None:
        raise MarketError("no population source configured")
    seed = config.seed if seed is None else seed
    if src.csv is not None:
        try:
            return read_population_csv(src.csv)
        except OSError as exc:
            raise ParseError(f"cannot read population {src.csv}: {exc}") from None
        except ValueError as exc:
            raise ParseError(f"malformed population {src.csv}: {exc}") from None
    if src.generate is not None:
        buyers = sellers = ()
        g = src.generate
        if g.buyers is not None:
            buyers = garnier_population(_garnier_spec(g.buyers, seed)).buyers
        if g.sellers is not None:
            sellers = cost_population(g.sellers.costs.to_spec(), g.sellers.n, seed).sellers
        return Population(buyers, sellers)
    return Population.from_limits(
        [tuple(b) if isinstance(b, list) else b for b in src.buyers or ()],
        [tuple(s) if isinstance(s, list) else s for s in src.sellers or ()],
    )


def _garnier_spec(section, seed: int) -> GarnierSpec:
    frac = section.fraction if isinstance(section.fraction, float) else section.fraction.to_spec()
    return GarnierSpec(section.wealth.to_spec(), section.n, seed, frac)


def _curves(config, w: _Writer) -> dict:
    pop = load_population(config)
    if pop.is_empty:
        raise EmptyMarket("curves need a nonempty population")
    dc, sc = demand_curve(pop), supply_curve(pop)
    rows = [(p, dc(p), sc(p), excess_supply(pop, p), potential_rent(pop, p)) for p in sorted(set(pop.limits()))]
    w.csv("curves.csv", ("price", "demand", "supply", "excess_supply", "potential_rent"), rows)
    interval, q = clearing(pop)
    return {
        "clearing_low": interval.low,
        "clearing_high": interval.high,
        "cleared_quantity": q,
        "max_surplus": max_surplus(pop),
        "demand_max_step": max_normalized_step(dc) if pop.buyers else None,
        "supply_max_step": max_normalized_step(sc) if pop.sellers else None,
    }


def _cov(config, w: _Writer) -> dict:
    pop = load_population(config)
    interval = center_of_value(pop)
    return {
        "low": interval.low,
        "high": interval.high,
        "min_rent": min_rent(pop),
        "cleared_quantity": clearing(pop)[1],
    }


def _garnier(config, w: _Writer, seed: int) -> dict:
    if config.garnier is not None:
        pop = garnier_population(_garnier_spec(config.garnier, seed))
    else:
        pop = load_population(config, seed)
    w.text("population.csv", write_population_csv(pop))
    return law_of_demand_report(pop)


def _auction(config, w: _Writer, seed: int) -> dict:
    pop = load_population(config, seed)
    s = config.session
    sc = SessionConfig(s.periods, s.steps_per_period, s.tick, s.policy, s.eagerness, s.margin, seed, s.p_max)
    result = run_session(sc, pop)
    w.csv("events.csv", ("time_index", "type", "side", "trader", "price"), result.events)
    w.csv(
        "periods.csv",
        ("period", "trades", "efficiency", "alpha"),
        [(i + 1, len(t), e, a) for i, (t, e, a) in enumerate(zip(result.trades, result.efficiency, result.alpha))],
    )
    interval = center_of_value(pop)
    effs = [e for e in result.efficiency if e is not None]
    return {
        "policy": s.policy,
        "center_low": interval.low,
        "center_high": interval.high,
        "max_surplus": max_surplus(pop),
        "mean_efficiency": statistics.fmean(effs) if effs else None,
        "efficiency": result.efficiency,
        "alpha": result.alpha,
    }


def _asset(config, w: _Writer, seed: int) -> dict:
    a = config.asset
    estimates = None
    n_fund = a.n_fundamental
    if config.population is not None:
        # fundamental estimates come from the buyer limits of the population
        pop = load_population(config, seed)
        estimates = tuple(float(u.limit) for u in pop.buyers for _ in range(u.quantity))
        n_fund = len(estimates)
    ac = AssetConfig(
        intrinsic_value=a.intrinsic_value,
        noise_sd=a.noise_sd,
        n_fundamental=n_fund,
        n_speculators=a.n_speculators if a.mode == "speculative" else 0,
        credit=tuple(a.credit_schedule()) if a.mode == "speculative" else (),
        rounds=a.rounds,
        steps_per_round=a.steps_per_round,
        tick=a.tick,
        seed=seed,
        theta=a.theta,
        window=a.window,
        eagerness=a.eagerness,
        speculator_eagerness=a.speculator_eagerness,
        margin=a.margin,
        endowment=a.endowment,
        estimates=estimates,
    )
    result = speculative_session(ac) if a.mode == "speculative" else fundamental_session(ac)
    w.csv("prices.csv", ("round", "close"), [(i + 1, c) for i, c in enumerate(result.closes)])
    w.csv("returns.csv", ("round", "log_return"), [(i + 2, r) for i, r in enumerate(result.returns)])
    return {
        "mode": a.mode,
        **tail_summary(result.returns),
        "max_price": result.max_price,
        "final_close": result.closes[-1],
        "median_estimate": statistics.median(result.estimates),
        "center_of_value": list(_interval(induced_population(result.estimates))),
        "trades": len(result.trades),
    }


def _interval(pop):
    iv = center_of_value(pop)
    return iv.low, iv.high


_REPEATABLE = {"garnier": _garnier, "auction": _auction, "asset": _asset}


def _repetition(args) -> tuple:
    config, root, index, seed = args
    prefix = f"rep_{index:03d}/" if index is not None else ""
    w = _Writer(Path(root) / prefix if prefix else Path(root), prefix)
    summary = _REPEATABLE[config.command](config, w, seed)
    summary = {"seed": seed, **summary} if index is not None else summary
    w.json("summary.json", summary)
    return w.files, _clean(summary)


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".manifest-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(config: ScenarioConfig, jobs: int = 1) -> RunManifest:
    """Execute ``config``, write every output and finally the manifest.

    ``jobs`` runs independent repetitions in that many worker processes;
    the outputs do not depend on it.

    Raises:
        MarketError: or another library error, with the command named.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    root = Path(config.out)
    root.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config_hash(config), config.seed, __version__, config.command)
    try:
        if config.command in _REPEATABLE:
            if config.repetitions == 1:
                tasks = [(config, str(root), None, config.seed)]
            else:
                tasks = [(config, str(root), i, repetition_seed(config.seed, i)) for i in range(config.repetitions)]
            if jobs > 1 and len(tasks) > 1:
                with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
                    results = list(pool.map(_repetition, tasks))
            else:
                results = [_repetition(t) for t in tasks]
            for files, _ in results:
                manifest.files.extend(files)
            if config.repetitions == 1:
                manifest.summary = results[0][1]
            else:
                w = _Writer(root)
                manifest.summary = {"repetitions": [s for _, s in results]}
                w.json("summary.json", manifest.summary)
                manifest.files.extend(w.files)
        else:
            w = _Writer(root)
            body = _curves(config, w) if config.command == "curves" else _cov(config, w)
            w.json("summary.json", body)
            manifest.files.extend(w.files)
            manifest.summary = _clean(body)
    except MarketError as exc:
        raise type(exc)(f"{config.command}: {exc}") from exc
    _atomic_write(root / "manifest.json", json.dumps(manifest.to_dict(), indent=2) + "\n")
    return manifest
