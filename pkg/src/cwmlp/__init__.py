"""Coordinate-wise minimization for hinge-sum linear programs, with dual
certificates of global optimality and encoders for classic LP relaxations."""

from .model import ProblemSpec, SparseMatrix, check_guarantee, objective, validate_spec
from .univariate import MinimizerSet, PiecewiseAffine, minimize_on_box, ri_point
from .solver import SolveResult, SolverConfig, is_interior_local_min, solve
from .duality import DualCertificate, build_certificate, dual_objective, verify

__all__ = [
    "ProblemSpec", "SparseMatrix", "check_guarantee", "objective", "validate_spec",
    "MinimizerSet", "PiecewiseAffine", "minimize_on_box", "ri_point",
    "SolveResult", "SolverConfig", "is_interior_local_min", "solve",
    "DualCertificate", "build_certificate", "dual_objective", "verify",
]

__version__ = "0.1.0"
