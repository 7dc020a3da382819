"""Spline density estimation with a bona fide (nonnegative) projection."""

from ._rpde import (
    Fit,
    SolverFailure,
    bspline,
    correlation,
    fit,
    reference_theory_db,
    sweep,
)

__all__ = [
    "Fit",
    "SolverFailure",
    "bspline",
    "correlation",
    "fit",
    "reference_theory_db",
    "sweep",
]
