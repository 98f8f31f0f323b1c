"""Simulation and verification tools for the preferential-attachment graph PA_t(m, delta)."""

from .digraph import OrderedDigraph, validate
from .errors import AssumptionError, BudgetExceeded, FeasibilityError, OrderingError, ParameterError
from .model import PAGraph, PAParams, generate

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "BudgetExceeded",
    "FeasibilityError",
    "OrderedDigraph",
    "OrderingError",
    "PAGraph",
    "PAParams",
    "ParameterError",
    "generate",
    "validate",
    "__version__",
]
