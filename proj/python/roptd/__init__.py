"""R-optimal experimental designs for multi-response regression."""

from ._roptd import (
    ConfigError,
    RoptdError,
    SingularInformationError,
    d_values,
    grid_points,
    round_design,
    solve,
    verify,
)

__all__ = [
    "ConfigError",
    "RoptdError",
    "SingularInformationError",
    "d_values",
    "grid_points",
    "round_design",
    "solve",
    "verify",
]
