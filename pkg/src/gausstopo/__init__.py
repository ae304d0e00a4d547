"""Topology of translation-invariant quantum Gaussian states and operations."""

from .bz_grid import BZGrid, make_grid, negate_index, trim_points
from .core import (MatrixField, RealSpaceCouplings, apply_op, decay_profile, fourier,
                   ground_state_covariance, inverse_fourier, validate)
from .errors import ConfigError, ConvergenceError, DomainError, GapError, SymmetryError
from .symmetry import AZClass, SymmetrySpec, az_class, extract_op, extract_state

__version__ = "0.1.0"

__all__ = [
    "BZGrid", "make_grid", "negate_index", "trim_points",
    "MatrixField", "RealSpaceCouplings", "apply_op", "decay_profile", "fourier",
    "ground_state_covariance", "inverse_fourier", "validate",
    "ConfigError", "ConvergenceError", "DomainError", "GapError", "SymmetryError",
    "AZClass", "SymmetrySpec", "az_class", "extract_op", "extract_state",
]
