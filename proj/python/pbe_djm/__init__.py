"""Exact series solutions of the breakage and aggregation-breakage equations."""

from ._core import (
    Expr,
    Grid,
    PbeError,
    Problem,
    Series,
    Term,
    canonical_config,
    closed_form_term,
    compute_series,
    convolve,
    eval_exact,
    exact_moment,
    example_problem,
    make_problem,
    parse_initial,
    run_case,
    solve_grid,
)

__all__ = [
    "Expr",
    "Grid",
    "PbeError",
    "Problem",
    "Series",
    "Term",
    "canonical_config",
    "closed_form_term",
    "compute_series",
    "convolve",
    "eval_exact",
    "exact_moment",
    "example_problem",
    "make_problem",
    "parse_initial",
    "run_case",
    "solve_grid",
]
