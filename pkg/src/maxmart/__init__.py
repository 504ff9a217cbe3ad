"""Azema-Yor martingales of Brownian motion and its running maximum.

Submodules: :mod:`functions` (the integrand ``f``), :mod:`paths` (simulation,
local time, stopping), :mod:`core` (evaluation of ``H``), :mod:`characterize`
(recovery of ``f`` and the form detector), :mod:`stattests` (Monte Carlo
verification) and :mod:`cli`.
"""

from .core import MaxMartingaleSpec, evaluate_direct, evaluate_integral, h_value, positive_form
from .errors import DomainError, InsufficientDataError, NumericError, ResourceLimitError, StateError
from .functions import RealFunction
from .paths import Path, simulate_bm

__all__ = [
    "DomainError", "InsufficientDataError", "MaxMartingaleSpec", "NumericError", "Path", "RealFunction",
    "ResourceLimitError", "StateError", "evaluate_direct", "evaluate_integral", "h_value", "positive_form",
    "simulate_bm",
]
