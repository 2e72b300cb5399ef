"""Lead-lag estimation between non-synchronously observed price series."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    InterleavingViolation,
    InvalidConfig,
    LeadLagError,
    NonMonotoneTime,
    NonPositivePrice,
    ParseError,
    TooShort,
    WindowTooShort,
    ZeroResolution,
)
from .naples import LagGrid, LagProfile, RollingEstimate, estimate_lag, naples_profile, naples_r, rolling_estimate  # noqa: E402
from .ticks import SignPath, TickSeries, eval_cum, log_returns, read_ticks_csv, shift, sign_path, validate  # noqa: E402

__all__ = [
    "DomainError",
    "InterleavingViolation",
    "InvalidConfig",
    "LagGrid",
    "LagProfile",
    "LeadLagError",
    "NonMonotoneTime",
    "NonPositivePrice",
    "ParseError",
    "RollingEstimate",
    "SignPath",
    "TickSeries",
    "TooShort",
    "WindowTooShort",
    "ZeroResolution",
    "estimate_lag",
    "eval_cum",
    "log_returns",
    "naples_profile",
    "naples_r",
    "read_ticks_csv",
    "rolling_estimate",
    "shift",
    "sign_path",
    "validate",
]
