"""Desk-scale numerics for Goldbach averages and contour extraction of psi(N)."""

from .circle import (
    ContourGrid,
    SeriesValues,
    eval_series_on_grid,
    make_grid,
    root_residual,
    square_residual,
    truncation_length,
)
from .fit import ExponentFit, dyadic_samples, estimate_delta, fit_exponent
from .goldbach import GoldbachSeries, SummatorySeries, goldbach_direct, goldbach_fast, summatory
from .kernel import (
    ArcDecomposition,
    ParsevalReport,
    arc_decomposition,
    extract_partial_sum,
    kernel_value,
    major_arc_bound_check,
    minor_arc_bound_check,
    minor_kernel_l2,
    parseval_check,
)
from .mangoldt import WeightKind, WeightTable, build_mangoldt_table, build_unit_table, partial_sum

__version__ = "0.1.0"

__all__ = [
    "ArcDecomposition", "ContourGrid", "ExponentFit", "GoldbachSeries", "ParsevalReport",
    "SeriesValues", "SummatorySeries", "WeightKind", "WeightTable",
    "arc_decomposition", "build_mangoldt_table", "build_unit_table", "dyadic_samples",
    "estimate_delta", "eval_series_on_grid", "extract_partial_sum", "fit_exponent",
    "goldbach_direct", "goldbach_fast", "kernel_value", "major_arc_bound_check",
    "make_grid", "minor_arc_bound_check", "minor_kernel_l2", "parseval_check",
    "partial_sum", "root_residual", "square_residual", "summatory", "truncation_length",
]
