"""Exception hierarchy shared by every module of the package."""


class MarketError(Exception):
    """Base class for all errors raised by ``classical_market``."""


class EmptyMarket(MarketError):
    """Raised when an operation needs traders on a side that has none."""


class InvalidSpec(MarketError, ValueError):
    """Raised for generator or distribution parameters outside their domain."""


class ZeroSurplus(MarketError):
    """Raised when efficiency is requested for a market with no gains from trade."""


class NoTrades(MarketError):
    """Raised when a trade-price statistic is requested for a period without trades."""


class InsufficientData(MarketError, ValueError):
    """Raised when a statistic lacks enough (or non-degenerate) observations."""


class StaleQuote(MarketError):
    """Raised when a quote arrives with a time index that is not increasing."""


class ParseError(MarketError):
    """Raised when configuration text is not well-formed."""


class ValidationError(MarketError):
    """Raised when a parsed configuration violates its schema.

    ``errors`` holds every problem found as ``(field_path, message)`` pairs,
    not only the first one.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{path}: {msg}" for path, msg in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))
