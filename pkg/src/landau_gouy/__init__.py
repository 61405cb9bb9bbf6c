"""Generalized Gouy rotation of electron vortex beams in a uniform magnetic field."""

from .errors import (
    AmbiguousUnwrapError,
    BandwidthError,
    BoundarySpillError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NodeProximityError,
)
from .modes import ModeIndex
from .params import PhysicalSetup, derive_setup, free_space_setup, setup_from_lab_units

__version__ = "0.1.0"

__all__ = [
    "AmbiguousUnwrapError",
    "BandwidthError",
    "BoundarySpillError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "ModeIndex",
    "NodeProximityError",
    "PhysicalSetup",
    "derive_setup",
    "free_space_setup",
    "setup_from_lab_units",
]
