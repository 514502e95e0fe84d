"""Classical price theory as computable objects.

Reservation-price populations and their step curves, the center of value
(the minimizer of potential rent), Garnier-style demand generation, a
continuous double auction, and an asset market with trend-following
speculators, plus tail diagnostics for the resulting returns.
"""

__version__ = "0.1.0"

from .asset import (
    AssetConfig,
    AssetResult,
    FundamentalTrader,
    Speculator,
    credit_ramp,
    draw_estimates,
    fundamental_session,
    induced_population,
    speculative_session,
    speculator_reservation,
    tail_summary,
)
from .auction import (
    ZIC,
    AdaptiveConcession,
    OrderBook,
    Quote,
    Session,
    SessionConfig,
    SessionResult,
    Trade,
    TraderAgent,
    alpha,
    efficiency,
    run_session,
    submit,
)
from .core import (
    Population,
    PriceInterval,
    Side,
    StepCurve,
    UnitValuation,
    clearing,
    demand_at,
    demand_curve,
    excess_supply,
    max_normalized_step,
    max_surplus,
    read_population_csv,
    supply_at,
    supply_curve,
    write_population_csv,
)
from .demand import DistributionSpec, GarnierSpec, cost_population, garnier_population, law_of_demand_report
from .errors import (
    EmptyMarket,
    InsufficientData,
    InvalidSpec,
    MarketError,
    NoTrades,
    ParseError,
    StaleQuote,
    ValidationError,
    ZeroSurplus,
)
from .tails import acf_abs, excess_kurtosis, hill_estimator, log_returns, max_drawdown
from .value import center_of_value, excess_rent, min_rent, potential_rent, rent_profile
