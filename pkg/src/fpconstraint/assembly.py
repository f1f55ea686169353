"""P1 finite-element matrices for the radial problem.

The discrete equation is

    (gamma A + M - mu (C + R)) U = mu S

where ``A`` and ``M`` are the weighted mass and stiffness matrices, ``C`` is the
skew-symmetric centred drift matrix with ``C[j, j+1] = r_{j+1}^(n-1) Phi'(r_{j+1}) / 2``
and ``R`` is the drift remainder. With ``drift="galerkin"`` the remainder is
chosen so that ``-(C + R)`` equals the Galerkin convection matrix
``D[i, j] = int r^(n-1) Phi' chi_j chi_i' dr``; with ``drift="centered"`` it is
zero and the scheme uses ``C`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import tridiag
from .csvio import write_csv
from .mesh import RadialMesh
from .model import Indicator, ModelSpec, evaluate_model
from .tridiag import Tridiagonal

LOAD_STYLES = ("hat", "cell")
DRIFT_STYLES = ("galerkin", "centered")


def _from_cells(
    mesh: RadialMesh, ll: np.ndarray, lr: np.ndarray, rl: np.ndarray, rr: np.ndarray
) -> Tridiagonal:
    """Scatter per-cell 2x2 blocks ``[[ll, lr], [rl, rr]]`` and drop the Dirichlet node."""
    m = mesh.n_unknowns
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += ll
    diag[1:] += rr
    return Tridiagonal(lower=rl[: m - 1].copy(), diag=diag[:m], upper=lr[: m - 1].copy())


def _weight(mesh: RadialMesh, r: np.ndarray) -> np.ndarray:
    return r ** (mesh.dim - 1)


def mass_matrix(mesh: RadialMesh) -> Tridiagonal:
    """``A[i, j] = int chi_i chi_j r^(n-1) dr`` (exact Gauss rule)."""
    r, t, w = mesh.cell_rule(mesh.exact_rule_points(0))
    ww = w * _weight(mesh, r)
    left, right = 1.0 - t, t
    ll = ww @ (left * left)
    rr = ww @ (right * right)
    lr = ww @ (left * right)
    return _from_cells(mesh, ll, lr, lr, rr)


def stiffness_matrix(mesh: RadialMesh) -> Tridiagonal:
    """``M[i, j] = int chi_i' chi_j' r^(n-1) dr``."""
    r, _, w = mesh.cell_rule(mesh.exact_rule_points(0))
    k = (w * _weight(mesh, r)).sum(axis=1) / mesh.h**2
    return _from_cells(mesh, k, -k, -k, k)


def centered_drift_matrix(mesh: RadialMesh, dphi) -> Tridiagonal:
    """Skew-symmetric ``C`` with ``C[j, j+1] = r_{j+1}^(n-1) Phi'(r_{j+1}) / 2``."""
    r_next = mesh.nodes[1 : mesh.n_unknowns]
    upper = 0.5 * _weight(mesh, r_next) * dphi(r_next)
    return Tridiagonal(lower=-upper, diag=np.zeros(mesh.n_unknowns), upper=upper)


def galerkin_drift_matrix(mesh: RadialMesh, dphi) -> Tridiagonal:
    """``D[i, j] = int r^(n-1) Phi'(r) chi_j(r) chi_i'(r) dr``.

    Exact for polynomial ``Phi'`` of degree <= 3 and for piecewise-linear tables.
    """
    r, t, w = mesh.cell_rule(mesh.exact_rule_points(3))
    g = w * _weight(mesh, r) * dphi(r)
    gl = g @ (1.0 - t) / mesh.h
    gr = g @ t / mesh.h
    # rows: test function derivative (-1/h left, +1/h right); columns: trial hat
    return _from_cells(mesh, ll=-gl, lr=-gr, rl=gl, rr=gr)


def load_vector(mesh: RadialMesh, model: ModelSpec, style: str = "hat") -> np.ndarray:
    """Source integrals per unknown node.

    ``hat``: ``int S chi_j r^(n-1) dr``. ``cell``: ``int_{r_j}^{r_{j+1}} S r^(n-1) dr``.
    The indicator source is integrated exactly over its intersection with each
    cell; tabulated sources through their P1 interpolant.
    """
    if style not in LOAD_STYLES:
        raise ValueError(f"load style must be one of {LOAD_STYLES}, got {style!r}")
    a = mesh.nodes[:-1]
    h = mesh.h
    src = model.source
    q = mesh.exact_rule_points(1)
    if isinstance(src, Indicator):
        lo = np.clip(src.lo, a, a + h)
        hi = np.clip(src.hi, a, a + h)
        x, wq = np.polynomial.legendre.leggauss(q)
        tau = 0.5 * (x + 1.0)
        r = lo[:, None] + (hi - lo)[:, None] * tau[None, :]
        w = 0.5 * wq[None, :] * (hi - lo)[:, None] * _weight(mesh, r)
    else:
        evaluate_model(model, mesh)  # length check
        r, _, w = mesh.cell_rule(q)
        w = w * _weight(mesh, r) * src.value(r)
    t = (r - a[:, None]) / h
    m = mesh.n_unknowns
    if style == "cell":
        return w.sum(axis=1)[:m].copy()
    load = np.zeros(mesh.n_nodes)
    load[:-1] += (w * (1.0 - t)).sum(axis=1)
    load[1:] += (w * t).sum(axis=1)
    return load[:m]


@dataclass(frozen=True)
class AssembledSystem:
    mesh: RadialMesh
    A: Tridiagonal
    Mstiff: Tridiagonal
    C: Tridiagonal
    R: Tridiagonal
    load: np.ndarray
    delta: np.ndarray
    drift: str = "galerkin"
    load_style: str = "hat"

    @property
    def size(self) -> int:
        return self.A.size

    @property
    def drift_total(self) -> Tridiagonal:
        """``C + R``: the matrix multiplying ``-mu`` in the system."""
        return self.C + self.R


def assemble(
    model: ModelSpec,
    mesh: RadialMesh,
    load_style: str = "hat",
    drift: str = "galerkin",
) -> AssembledSystem:
    if drift not in DRIFT_STYLES:
        raise ValueError(f"drift must be one of {DRIFT_STYLES}, got {drift!r}")
    if mesh.dim != model.dim:
        raise ValueError(f"mesh dim {mesh.dim} does not match model dim {model.dim}")
    tables = evaluate_model(model, mesh)
    dphi = model.potential.d1
    C = centered_drift_matrix(mesh, dphi)
    if drift == "galerkin":
        R = (-1.0) * galerkin_drift_matrix(mesh, dphi) - C
    else:
        R = tridiag.zeros(mesh.n_unknowns)
    return AssembledSystem(
        mesh=mesh,
        A=mass_matrix(mesh),
        Mstiff=stiffness_matrix(mesh),
        C=C,
        R=R,
        load=load_vector(mesh, model, load_style),
        delta=tables.delta[: mesh.n_unknowns].copy(),
        drift=drift,
        load_style=load_style,
    )


def _check_gamma(gamma: float) -> None:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")


def system_matrix(sys: AssembledSystem, mu: float, gamma: float) -> Tridiagonal:
    """``gamma A + M - mu (C + R)``."""
    _check_gamma(gamma)
    return gamma * sys.A + sys.Mstiff - mu * sys.drift_total


def system_apply_extended(sys: AssembledSystem, mu: float, gamma: float, transpose: bool = False):
    """Extended-precision action of ``gamma A + M - mu (C + R)`` (or its transpose).

    Forming the matrix in float64 rounds its entries differently for every
    ``mu``; refining against the unrounded operator keeps ``F`` smooth in ``mu``
    down to roundoff, which finite-difference checks of ``F'`` rely on.
    """
    _check_gamma(gamma)
    ld = np.longdouble
    parts = [(ld(gamma), sys.A), (ld(1.0), sys.Mstiff), (-ld(mu), sys.C), (-ld(mu), sys.R)]
    if transpose:
        parts = [(c, T.T) for c, T in parts]

    def apply(x):
        return sum(c * T.matvec_extended(x) for c, T in parts)

    return apply


def write_system_csv(
    path: str | Path, sys: AssembledSystem, mu: float, gamma: float, params=None
) -> Path:
    """Dump the system matrix at ``mu`` and the load: index, sub, diag, super, load.

    ``sub[i]`` is entry ``(i, i-1)`` and ``super[i]`` entry ``(i, i+1)``; both are
    zero where the entry does not exist.
    """
    K = system_matrix(sys, mu, gamma)
    m = K.size
    sub = np.concatenate([[0.0], K.lower])
    sup = np.concatenate([K.upper, [0.0]])
    header = dict(params or {})
    header.update(mu=mu, gamma=gamma, n=sys.mesh.dim, N=sys.mesh.n_intervals,
                  drift=sys.drift, load_style=sys.load_style)
    rows = zip(range(m), sub, K.diag, sup, sys.load)
    return write_csv(path, header, ["index", "sub", "diag", "super", "load"], rows)
