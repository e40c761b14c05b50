"""Semiparametric quantum estimation bounds.

Operators are square NumPy arrays; functionals and constraints are opaque
handles built with the factory functions below.
"""

import json

from ._core import (
    Constraint,
    ConvergenceError,
    Error,
    Functional,
    InfiniteBound,
    InvalidInput,
    RangeConditionError,
    Source,
    SupportError,
    belavkin_check,
    constrained_oracle,
    direct_imaging_error,
    direct_imaging_estimator,
    displacement_oracle,
    ec_lower_bound,
    entropy,
    expectation,
    f0_oracle,
    fidelity_pure,
    functional_value,
    gamma_matrix,
    ghb_constrained,
    ghb_displacement,
    ghb_full_dimensional,
    ghb_vector,
    holevo_bound,
    holevo_objective,
    influence_operator,
    linear_moment,
    purity,
    relative_entropy,
    spade_error_even,
)
from ._core import run_scenario as _run_scenario

__version__ = "0.3.0"


def run_scenario(config, command, seed=None, threads=1):
    """Run a YAML scenario under a CLI subcommand name; returns (payload, status)."""
    text, status = _run_scenario(config, command, seed, threads)
    return json.loads(text), status
