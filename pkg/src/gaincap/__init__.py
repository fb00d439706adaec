"""Capacity sets of state-feedback gains for disturbed initial states."""

from .capacity import (
    DETERMINED,
    ITERATION_LIMIT,
    AnalysisReport,
    BetaViolation,
    CapacitySet,
    DeterminationError,
    Gain,
    IterationRecord,
    MembershipResult,
    SensitivityReport,
    SystemSpec,
    Trajectory,
    Violation,
    analyze,
    check_gain,
    closed_loop,
    determine,
    membership,
    region_sample,
    sensitivity_rows,
    simulate,
    stop_test,
)
from .linalg import EigenConvergenceError
from .lp import LpOutcome, LpProblem, SimplexBudgetError, solve

__all__ = [
    "DETERMINED",
    "ITERATION_LIMIT",
    "AnalysisReport",
    "BetaViolation",
    "CapacitySet",
    "DeterminationError",
    "EigenConvergenceError",
    "Gain",
    "IterationRecord",
    "LpOutcome",
    "LpProblem",
    "MembershipResult",
    "SensitivityReport",
    "SimplexBudgetError",
    "SystemSpec",
    "Trajectory",
    "Violation",
    "analyze",
    "check_gain",
    "closed_loop",
    "determine",
    "membership",
    "region_sample",
    "sensitivity_rows",
    "simulate",
    "solve",
    "stop_test",
]

__version__ = "0.1.0"
