"""Coupled metamodel and model evolution. Models, metamodels and histories
travel as JSON text."""

from ._core import (
    BindingError,
    CoevoError,
    ConstraintError,
    HistoryError,
    Recorder,
    TransactionError,
    canonical,
    case_history,
    case_metamodels,
    check_conformance,
    gen_fixture,
    isomorphic,
    migrate,
    run_case,
)

__all__ = [
    "BindingError",
    "CoevoError",
    "ConstraintError",
    "HistoryError",
    "Recorder",
    "TransactionError",
    "canonical",
    "case_history",
    "case_metamodels",
    "check_conformance",
    "gen_fixture",
    "isomorphic",
    "migrate",
    "run_case",
]
