"""Moments of exponential sums over k-free numbers."""

from ._core import (
    BudgetExceeded,
    MomentResult,
    __version__,
    choose_plan,
    compute_cr,
    count_kfree,
    eval_direct,
    fejer,
    fit_exponent,
    kernel_nk,
    major_arc_scan,
    mobius,
    moment,
    moments,
    parseval,
    set_threads,
    theoretical_e,
    verify_decomposition,
)

__all__ = [
    "BudgetExceeded",
    "MomentResult",
    "__version__",
    "choose_plan",
    "compute_cr",
    "count_kfree",
    "eval_direct",
    "fejer",
    "fit_exponent",
    "kernel_nk",
    "major_arc_scan",
    "mobius",
    "moment",
    "moments",
    "parseval",
    "set_threads",
    "theoretical_e",
    "verify_decomposition",
]
