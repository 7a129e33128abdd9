"""Damped Newton solver for semi-discrete generated Jacobian equations."""

from .genfun import (
    Density,
    Domain,
    DomainError,
    Family,
    GeneratingFunctionSpec,
    quadratic_ot,
    reflector,
    square_domain,
    twist_gamma_bound,
)
from .diagram import LaguerreDiagram, build_cell, build_diagram
from .massmap import AdmissibleParams, InitializationError, initial_potential, jacobian, mass, structure_diagnostics
from .newton import Problem, SolverConfig, SolverReport, Status, newton_direction, solve

__all__ = [
    "AdmissibleParams",
    "Density",
    "Domain",
    "DomainError",
    "Family",
    "GeneratingFunctionSpec",
    "InitializationError",
    "LaguerreDiagram",
    "Problem",
    "SolverConfig",
    "SolverReport",
    "Status",
    "build_cell",
    "build_diagram",
    "initial_potential",
    "jacobian",
    "mass",
    "newton_direction",
    "quadratic_ot",
    "reflector",
    "solve",
    "square_domain",
    "structure_diagnostics",
    "twist_gamma_bound",
]
