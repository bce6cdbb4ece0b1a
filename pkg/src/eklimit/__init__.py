"""Euler-Korteweg simulation, its zero-capillarity Euler limit and relative-entropy diagnostics."""

from .state import DomainError, StateFunctions
from .grid import EVEN, ODD, EXTRAPOLATED, Field, Grid1D

__all__ = [
    "DomainError",
    "StateFunctions",
    "Grid1D",
    "Field",
    "EVEN",
    "ODD",
    "EXTRAPOLATED",
]

__version__ = "0.1.0"
