"""Semidirect-product mechanics of 1-D barotropic flow on a periodic grid."""

from semidirect.algebra import Density, Diffeo, OneFormDensity, SemidirectElement
from semidirect.dynamics import SimulationConfig, TrajectoryRecord, simulate
from semidirect.errors import (
    FiniteDifferenceError,
    GridMismatchError,
    InversionError,
    MonotonicityError,
    PositivityError,
    SimulationAbort,
)
from semidirect.grid import Field, Grid
from semidirect.hamiltonian import ConservativeState, Functional
from semidirect.lagrangian import BarotropicLaw, MaterialState, PolytropicLaw, ReducedState

__all__ = [
    "BarotropicLaw",
    "ConservativeState",
    "Density",
    "Diffeo",
    "Field",
    "FiniteDifferenceError",
    "Functional",
    "Grid",
    "GridMismatchError",
    "InversionError",
    "MaterialState",
    "MonotonicityError",
    "OneFormDensity",
    "PolytropicLaw",
    "PositivityError",
    "ReducedState",
    "SemidirectElement",
    "SimulationAbort",
    "SimulationConfig",
    "TrajectoryRecord",
    "simulate",
]
