"""Completely irreversible doubly-nonlinear evolution in one space dimension."""

from ._core import *  # noqa: F401,F403
from ._core import IrrevError, ConfigError, ValidationFailed, SolverError, EvolutionError  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
