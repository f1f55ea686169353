"""Constrained stationary Fokker-Planck problem with a radial P1 scheme.

Find ``mu >= 0`` with ``F(mu) = int delta u_mu = ell`` where ``u_mu`` solves
``gamma u - mu div(grad Phi u) - Lap u = mu S`` on a ball with zero boundary
values.
"""

from .assembly import AssembledSystem, assemble, system_matrix
from .experiments import PRESETS, run_preset
from .inversion import InversionReport, MonotonicityScan, Status, invert, scan_monotonicity
from .mesh import RadialMesh, build_mesh
from .model import (
    ConfigError,
    DoubleWell,
    GaussianAtOrigin,
    Indicator,
    ModelSpec,
    QuarticTail,
    Quadratic,
    ShiftedGaussian,
    check_hypotheses,
    parse_config,
)
from .oracles import check_asymptote, check_moments, exact_moments
from .solver import evaluate, solve_adjoint, solve_primal, solve_sensitivity
from .tridiag import SolverError, Tridiagonal

__all__ = [
    "AssembledSystem", "ConfigError", "DoubleWell", "GaussianAtOrigin", "Indicator",
    "InversionReport", "ModelSpec", "MonotonicityScan", "PRESETS", "QuarticTail",
    "Quadratic", "RadialMesh", "ShiftedGaussian", "SolverError", "Status", "Tridiagonal",
    "assemble", "build_mesh", "check_asymptote", "check_hypotheses", "check_moments",
    "evaluate", "exact_moments", "invert", "parse_config", "run_preset", "scan_monotonicity",
    "solve_adjoint", "solve_primal", "solve_sensitivity", "system_matrix",
]
