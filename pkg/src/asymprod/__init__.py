"""Finite products of S-function quotients and their asymptotics."""

from __future__ import annotations

from .asymptotics import (
    Asymptote,
    c_upper_bound,
    exercise_limit,
    growth_exponent,
    k_asymptote,
    k_gamma_identity,
    log_gamma,
)
from .catalog import (
    FunctionClass,
    FunctionSpec,
    Kind,
    TaylorSignature,
    classify,
    combine_add,
    combine_mul,
    derivative_of_S,
    find_epsilon,
    rescale,
    scale_module,
    to_C,
)
from .catalog import get as get_function
from .errors import *  # noqa: F401,F403
from .lemmas import (
    BoundWitness,
    CheckReport,
    check_E_monotone,
    check_logconcavity,
    check_lower_bound,
    check_term_monotonicity,
    check_upper_bound,
    compute_bound_witness,
    consecutive_E,
)
from .limits import (
    ConvergenceReport,
    LimitEstimate,
    Model,
    Schedule,
    estimate_C,
    extrapolate,
    fit_convergence_rate,
    fit_growth_exponent,
    select_limit,
    sequence_E,
    sequence_log_D,
)
from .products import (
    ProductParams,
    ProductValue,
    eval_D,
    eval_E,
    eval_K,
    eval_K_exact,
    exact_k_product,
    term_count,
)

__version__ = "0.1.0"
