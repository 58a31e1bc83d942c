"""Relative divergences of type s, their symmetrizations, and a verification toolkit."""

from .core import (
    AlphaFamily,
    Distribution,
    LogRatioStats,
    alpha_family,
    check_order,
    chi_sq,
    csiszar_f,
    growth_lower_bound,
    hellinger_sq,
    kl,
    ks,
    ks_curve,
    ks_terms,
    lambda_s,
    log_ratio_stats,
    make_distribution,
    unboundedness_witness,
)
from .errors import *  # noqa: F401,F403
from .oracle import oracle_ks, oracle_ks_curve
from .symmetrized import (
    SymmetrizedPoint,
    jeffreys,
    symmetrized_curve,
    symmetrized_point,
    u,
    u_star,
    v,
    v_star,
)
from .verify import CHECK_NAMES, PropertyReport, SuiteConfig, run_check, run_suite

__version__ = "0.1.0"
