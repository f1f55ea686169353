"""Primal, adjoint and sensitivity solves; constraint value F(mu) and F'(mu)."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .assembly import AssembledSystem, system_apply_extended, system_matrix
from .csvio import write_csv
from .model import ModelSpec
from .tridiag import SolverError


@dataclass(frozen=True)
class SolveResult:
    mu: float
    U: np.ndarray
    f_value: float
    residual: float
    min_value: float


@dataclass(frozen=True)
class AdjointResult:
    mu: float
    Psi: np.ndarray
    duality_value: float


@dataclass(frozen=True)
class SensitivityResult:
    mu: float
    Uprime: np.ndarray
    fprime_value: float


def constraint_value(sys: AssembledSystem, U: np.ndarray) -> float:
    """``F = delta^T A U``, the constraint integral in the FE quadrature."""
    return float(np.dot(sys.delta, sys.A.matvec(U)))


def _backward_error(K, x, rhs) -> float:
    """Normwise backward error ``|Kx - b| / (|K| |x| + |b|)`` in the infinity norm."""
    absK = np.abs(K.diag) + np.pad(np.abs(K.upper), (0, 1)) + np.pad(np.abs(K.lower), (1, 0))
    scale = float(np.max(absK)) * float(np.max(np.abs(x))) + float(np.max(np.abs(rhs)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(K.matvec(x) - rhs))) / scale


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not (mu >= 0 and np.isfinite(mu)):
        raise ValueError(f"mu must be finite and non-negative, got {mu!r}")
    return mu


def solve_primal(sys: AssembledSystem, model: ModelSpec, mu: float) -> SolveResult:
    mu = _check_mu(mu)
    K = system_matrix(sys, mu, model.gamma)
    rhs = mu * sys.load
    U = K.solve(rhs, apply_extended=system_apply_extended(sys, mu, model.gamma))
    return SolveResult(
        mu=mu,
        U=U,
        f_value=constraint_value(sys, U),
        residual=_backward_error(K, U, rhs),
        min_value=float(U.min()),
    )


def solve_adjoint(sys: AssembledSystem, model: ModelSpec, mu: float) -> AdjointResult:
    """Solve ``K^T Psi = A delta``; then ``F(mu) = mu Psi^T S``."""
    mu = _check_mu(mu)
    K = system_matrix(sys, mu, model.gamma)
    Psi = K.T.solve(
        sys.A.matvec(sys.delta),
        apply_extended=system_apply_extended(sys, mu, model.gamma, transpose=True),
    )
    return AdjointResult(mu=mu, Psi=Psi, duality_value=mu * float(np.dot(Psi, sys.load)))


def solve_sensitivity(
    sys: AssembledSystem, model: ModelSpec, mu: float, U: np.ndarray
) -> SensitivityResult:
    """Exact mu-derivative of the discrete solution: ``K U' = S + (C + R) U``."""
    mu = _check_mu(mu)
    U = np.asarray(U, dtype=float)
    if U.shape != (sys.size,):
        raise ValueError(f"U must have length {sys.size}, got {U.shape}")
    K = system_matrix(sys, mu, model.gamma)
    rhs = (sys.load.astype(np.longdouble) + sys.C.matvec_extended(U) + sys.R.matvec_extended(U))
    Uprime = K.solve(rhs.astype(float), apply_extended=system_apply_extended(sys, mu, model.gamma))
    return SensitivityResult(mu=mu, Uprime=Uprime, fprime_value=constraint_value(sys, Uprime))


def evaluate(sys: AssembledSystem, model: ModelSpec, mu: float) -> tuple[float, float]:
    """``(F(mu), F'(mu))`` from one primal and one sensitivity solve."""
    primal = solve_primal(sys, model, mu)
    sens = solve_sensitivity(sys, model, mu, primal.U)
    if not (np.isfinite(primal.f_value) and np.isfinite(sens.fprime_value)):
        raise SolverError(f"non-finite constraint value at mu={mu!r}")
    return primal.f_value, sens.fprime_value


def write_solution_csv(
    path: str | Path,
    sys: AssembledSystem,
    model: ModelSpec,
    primal: SolveResult,
    adjoint: AdjointResult | None = None,
    sensitivity: SensitivityResult | None = None,
) -> Path:
    mesh = sys.mesh
    m = sys.size
    nan = np.full(m, np.nan)
    psi = adjoint.Psi if adjoint is not None else nan
    up = sensitivity.Uprime if sensitivity is not None else nan
    # the Dirichlet node closes the profile
    r = mesh.nodes
    cols = [np.append(primal.U, 0.0), np.append(psi, 0.0), np.append(up, 0.0)]
    params = {"mu": primal.mu, "gamma": model.gamma, "n": mesh.dim, "N": mesh.n_intervals,
              "radius": mesh.radius, "drift": sys.drift, "load_style": sys.load_style}
    params.update(model.describe())
    return write_csv(path, params, ["r", "u", "psi", "uprime"], zip(r, *cols))
