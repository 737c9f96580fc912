"""Mesh-free variational RBF solvers for elliptic and obstacle problems."""

from rbfvar.errors import ConfigurationError, DomainError, NumericError, RbfVarError
from rbfvar.kernels import Kernel, KernelKind, c_opt, shape_param
from rbfvar.geometry import (
    CenterSet,
    CollocationSet,
    Domain,
    sample_centers,
    sample_collocation,
)
from rbfvar.assembly import AssembledSystem, ProblemKind, assemble_system, evaluate_uhat
from rbfvar.tsvd import TsvdFactors, tsvd_apply, tsvd_factorize
from rbfvar.solvers import (
    AdmmParams,
    EllipticParams,
    SolveReport,
    solve_elliptic,
    solve_obstacle,
)
from rbfvar.benchmarks import get_benchmark, relative_l2_error

__version__ = "0.1.0"

__all__ = [
    "AdmmParams",
    "AssembledSystem",
    "CenterSet",
    "CollocationSet",
    "ConfigurationError",
    "Domain",
    "DomainError",
    "EllipticParams",
    "Kernel",
    "KernelKind",
    "NumericError",
    "ProblemKind",
    "RbfVarError",
    "SolveReport",
    "TsvdFactors",
    "assemble_system",
    "c_opt",
    "evaluate_uhat",
    "get_benchmark",
    "relative_l2_error",
    "sample_centers",
    "sample_collocation",
    "shape_param",
    "solve_elliptic",
    "solve_obstacle",
    "tsvd_apply",
    "tsvd_factorize",
]
