"""Theorem verifiers, the ratio-sum counterexample and small-t expansion checks."""

from .comparison import (
    SearchInstance,
    audit_ricci_bound,
    audit_sectional_bound,
    check_bishop,
    check_bishop_gromov,
    check_flat_corollary,
    check_guenther,
    search_ratio_violation,
    tidal_equality,
    two_level_family,
)
from .counterexample import ratio_sum_counterexample, ratio_sum_reversal
from .expansions import (
    fit_detA_expansion,
    fit_jacobi_expansion,
    local_comparison,
    riemannian_ball_comparison,
)

__all__ = [
    "SearchInstance",
    "audit_ricci_bound",
    "audit_sectional_bound",
    "check_bishop",
    "check_bishop_gromov",
    "check_flat_corollary",
    "check_guenther",
    "fit_detA_expansion",
    "fit_jacobi_expansion",
    "local_comparison",
    "ratio_sum_counterexample",
    "ratio_sum_reversal",
    "riemannian_ball_comparison",
    "search_ratio_violation",
    "tidal_equality",
    "two_level_family",
]
