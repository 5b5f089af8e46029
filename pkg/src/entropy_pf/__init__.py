"""Finite-difference solver and verification suite for a phase-field system
with singular entropy-balance temperature equation, regularized by the
Yosida logarithm and a mollified singular source."""

from .model import BoundaryData, InitialCondition, Potentials, ProblemSpec, SourceSpec, validate_spec
from .monotone import BaseBeta, Coefficient, MollifiedBeta, RegularizedLog
from .stepper import SchemeConfig, State, Trajectory, run, simulate

__version__ = "0.1.0"

__all__ = [
    "BaseBeta",
    "BoundaryData",
    "Coefficient",
    "InitialCondition",
    "MollifiedBeta",
    "Potentials",
    "ProblemSpec",
    "RegularizedLog",
    "SchemeConfig",
    "SourceSpec",
    "State",
    "Trajectory",
    "run",
    "simulate",
    "validate_spec",
]
