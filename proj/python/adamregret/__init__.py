"""ADAM with a decaying first-moment rate, regret bound evaluation and a
moment-ratio inequality probe."""

from ._core import (
    AdamState,
    BoundReport,
    ConfigError,
    ConjectureReport,
    ConvexProblem,
    Error,
    HyperParams,
    InvalidParams,
    NumericError,
    Trajectory,
    UnboundedMinimizerError,
    adam_run,
    adam_step,
    conjecture_sides,
    fuzz,
    gd_step,
    geometric_sum_closed_form,
    run,
    theorem_bound,
)

__all__ = [
    "AdamState",
    "BoundReport",
    "ConfigError",
    "ConjectureReport",
    "ConvexProblem",
    "Error",
    "HyperParams",
    "InvalidParams",
    "NumericError",
    "Trajectory",
    "UnboundedMinimizerError",
    "adam_run",
    "adam_step",
    "conjecture_sides",
    "fuzz",
    "gd_step",
    "geometric_sum_closed_form",
    "run",
    "theorem_bound",
]
