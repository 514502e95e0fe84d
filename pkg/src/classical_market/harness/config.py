"""Scenario configuration: YAML text in, validated ``ScenarioConfig`` out.

Schema (every section is optional unless the command needs it)::

    command: cov              # curves | cov | garnier | auction | asset
    seed: 42                  # required, unsigned 64-bit
    out: results              # output directory (default "out")
    repetitions: 1            # independent repeats (garnier, auction, asset)
    population:               # exactly one source
      csv: pop.csv            #   a side,limit,quantity file, or
      buyers: [10, 8, [6, 2]] #   inline limits or [limit, quantity], or
      sellers: [5, 7, 9]
      generate:               #   generated traders
        buyers: {wealth: {kind: uniform, a: 0, b: 100}, fraction: 1.0, n: 8}
        sellers: {costs: {kind: uniform, a: 0, b: 100}, n: 8}
    garnier: {wealth: {...}, fraction: 0.1, n: 1000}
    session: {periods: 5, steps_per_period: 1000, tick: 0.01, policy: zic,
              eagerness: 0.2, margin: 0.2}
    asset:   {mode: fundamental, intrinsic_value: 100, noise_sd: 5, ...,
              credit: [..] | {start: 110, growth: 0.08, freeze_round: 26}}
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..errors import ParseError, ValidationError

__all__ = ["COMMANDS", "ScenarioConfig", "parse_config", "build_config", "config_hash"]

COMMANDS = ("curves", "cov", "garnier", "auction", "asset")

Number = Union[int, float]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Distribution(_Model):
    kind: Literal["uniform", "triangular", "pareto", "lognormal"]
    a: Optional[float] = None
    b: Optional[float] = None
    mode: Optional[float] = None
    x_min: Optional[float] = None
    alpha: Optional[float] = None
    mu: Optional[float] = None
    sigma: Optional[float] = None

    def to_spec(self):
        from ..demand import DistributionSpec

        return DistributionSpec.from_dict(self.model_dump(exclude_none=True))

    @model_validator(mode="after")
    def _check(self):
        self.to_spec()
        return self


class GarnierSection(_Model):
    wealth: Distribution
    fraction: Union[float, Distribution] = 1.0
    n: int = Field(ge=1)


class CostSection(_Model):
    costs: Distribution
    n: int = Field(ge=0)


class GenerateSection(_Model):
    buyers: Optional[GarnierSection] = None
    sellers: Optional[CostSection] = None


class PopulationSection(_Model):
    csv: Optional[str] = None
    buyers: Optional[List[Union[float, List[Number]]]] = None
    sellers: Optional[List[Union[float, List[Number]]]] = None
    generate: Optional[GenerateSection] = None

    @model_validator(mode="after")
    def _one_source(self):
        sources = [self.csv is not None, self.buyers is not None or self.sellers is not None,
                   self.generate is not None]
        if sum(sources) != 1:
            raise ValueError("exactly one of csv, buyers/sellers or generate is required")
        return self


class SessionSection(_Model):
    periods: int = Field(5, ge=1)
    steps_per_period: int = Field(1000, ge=1)
    tick: float = Field(0.01, gt=0)
    policy: Literal["zic", "adaptive"] = "zic"
    eagerness: float = Field(0.2, gt=0, le=1)
    margin: float = Field(0.2, ge=0, lt=1)
    p_max: Optional[float] = Field(None, gt=0)


class CreditRamp(_Model):
    start: float = Field(ge=0)
    growth: float = Field(ge=0)
    freeze_round: int = Field(ge=1)

    def schedule(self, rounds: int) -> list:
        from ..asset import credit_ramp

        return list(credit_ramp(self.start, self.growth, self.freeze_round, rounds))


class AssetSection(_Model):
    mode: Literal["fundamental", "speculative"] = "fundamental"
    intrinsic_value: float = Field(100.0, gt=0)
    noise_sd: float = Field(5.0, ge=0)
    n_fundamental: int = Field(50, ge=0)
    n_speculators: int = Field(0, ge=0)
    rounds: int = Field(20, ge=1)
    steps_per_round: int = Field(2000, ge=1)
    tick: float = Field(0.01, gt=0)
    theta: float = Field(1.5, ge=0)
    window: int = Field(1, ge=1)
    eagerness: float = Field(0.3, gt=0, le=1)
    speculator_eagerness: float = Field(1.0, gt=0, le=1)
    margin: float = Field(0.02, ge=0, lt=1)
    endowment: int = Field(60, ge=0)
    credit: Union[List[float], CreditRamp, None] = None

    @model_validator(mode="after")
    def _credit(self):
        if self.mode == "speculative":
            if self.n_speculators < 1:
                raise ValueError("speculative mode needs n_speculators >= 1")
            if self.credit is None:
                raise ValueError("speculative mode needs a credit schedule")
            if isinstance(self.credit, list) and len(self.credit) != self.rounds:
                raise ValueError(f"credit has {len(self.credit)} entries for {self.rounds} rounds")
        return self

    def credit_schedule(self) -> list:
        if self.credit is None:
            return []
        if isinstance(self.credit, CreditRamp):
            return self.credit.schedule(self.rounds)
        return list(self.credit)


class ScenarioConfig(_Model):
    command: Literal["curves", "cov", "garnier", "auction", "asset"]
    seed: int = Field(ge=0, lt=2**64)
    out: str = "out"
    repetitions: int = Field(1, ge=1)
    population: Optional[PopulationSection] = None
    garnier: Optional[GarnierSection] = None
    session: Optional[SessionSection] = None
    asset: Optional[AssetSection] = None

    @model_validator(mode="after")
    def _sections(self):
        if self.command in ("curves", "cov", "auction") and self.population is None:
            raise ValueError(f"command {self.command!r} needs a population section")
        if self.command == "garnier" and (self.garnier is None) == (self.population is None):
            raise ValueError("garnier needs exactly one of a garnier section or a population")
        if self.command == "auction" and self.session is None:
            self.session = SessionSection()
        if self.command == "asset" and self.asset is None:
            self.asset = AssetSection()
        return self


def _loc(loc) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def build_config(data: Any, command: Optional[str] = None, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Validate an already-parsed mapping, applying ``command`` and overrides.

    Raises:
        ValidationError: listing every problem with its field path.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError([("<root>", "configuration must be a mapping")])
    data = dict(data)
    if command is not None:
        if "command" in data and data["command"] != command:
            raise ValidationError([("command", f"config is for {data['command']!r}, not {command!r}")])
        data["command"] = command
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    try:
        return ScenarioConfig.model_validate(data)
    except PydanticValidationError as exc:
        errors = []
        for err in exc.errors():
            msg = err["msg"]
            if err["type"] == "missing":
                msg = "field required"
            errors.append((_loc(err["loc"]), msg))
        raise ValidationError(errors) from None


def parse_config(text: str, command: Optional[str] = None, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Parse YAML ``text`` into a validated ``ScenarioConfig``.

    Raises:
        ParseError: if the text is not well-formed YAML.
        ValidationError: if it does not match the schema.
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed configuration: {exc}") from None
    return build_config(data, command, overrides)


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical JSON form, ignoring the output directory."""
    payload = config.model_dump(mode="json", exclude={"out"})
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
