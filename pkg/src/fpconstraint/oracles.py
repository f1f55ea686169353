"""Analytic cross-checks: mass and even-moment identities, large-mu slope.

The moment identities hold on the whole space; the radial measure ``r^(n-1) dr``
is used on both sides, so the angular factor cancels. All source moments come
from the indicator antiderivative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .assembly import AssembledSystem, assemble
from .mesh import RadialMesh, build_mesh, weighted_inner_product
from .model import Indicator, ModelSpec, Quadratic, check_hypotheses, curvature_scale
from .solver import SolveResult, solve_primal


class ResolutionWarning(UserWarning):
    """The mesh does not resolve the concentration scale at the origin."""


def mass_prefactor(mu: float, gamma: float, source_integral: float) -> float:
    """Total mass ``mu * int S / gamma`` predicted by integrating the equation."""
    return mu * source_integral / gamma


def source_moment(model: ModelSpec, k: int) -> float:
    if not isinstance(model.source, Indicator):
        raise TypeError("closed-form source moments need an Indicator source")
    return model.source.moment(k, model.dim)


def exact_moments(model: ModelSpec, mu: float) -> tuple[float, float, float]:
    """Closed-form ``(m0, m2, m4)`` for ``Phi = a r^2``.

    With ``x . grad Phi = 2 a |x|^2`` the moment equations close:

        m0 = mu I0 / gamma
        m2 = mu (I2 + 2N I0 / gamma) / (gamma + 4 a mu)
        m4 = (mu I4 + (4N + 8) m2) / (gamma + 8 a mu)

    where ``Ik = int r^k S``. For ``a = 1`` the last line expands to
    ``I4 mu/(gamma+8mu) + B mu/((gamma+8mu)(gamma+4mu))`` with
    ``B = (4N+8) int (r^2 + 2N/gamma) S``.
    """
    if not isinstance(model.potential, Quadratic):
        raise TypeError("exact moments are only available for a quadratic potential")
    a = model.potential.a
    g, n = model.gamma, model.dim
    i0, i2, i4 = (source_moment(model, k) for k in (0, 2, 4))
    m0 = mass_prefactor(mu, g, i0)
    m2 = mu * (i2 + 2 * n * i0 / g) / (g + 4 * a * mu)
    m4 = (mu * i4 + (4 * n + 8) * m2) / (g + 8 * a * mu)
    return m0, m2, m4


def fourth_moment_derivative(model: ModelSpec, mu: float) -> float:
    """``d m4 / d mu`` for ``Phi = a r^2``; may change sign."""
    a = model.potential.a
    g, n = model.gamma, model.dim
    i0, i2, i4 = (source_moment(model, k) for k in (0, 2, 4))
    c2 = i2 + 2 * n * i0 / g
    m2 = mu * c2 / (g + 4 * a * mu)
    dm2 = c2 * g / (g + 4 * a * mu) ** 2
    num = mu * i4 + (4 * n + 8) * m2
    dnum = i4 + (4 * n + 8) * dm2
    den = g + 8 * a * mu
    return (dnum * den - num * 8 * a) / den**2


def second_moment_bound(model: ModelSpec, lam: float) -> float:
    """Uniform-in-mu bound ``int (r^2 + 2N/gamma) S / (2 Lambda)``."""
    if not lam > 0:
        raise ValueError(f"lower Hessian bound must be positive, got {lam!r}")
    i0, i2 = source_moment(model, 0), source_moment(model, 2)
    return (i2 + 2 * model.dim * i0 / model.gamma) / (2 * lam)


@dataclass(frozen=True)
class MomentReport:
    mu: float
    m0: float
    m2: float
    m4: float
    m0_exact: float | None = None
    m2_exact: float | None = None
    m4_exact: float | None = None

    @property
    def rel_errors(self) -> tuple[float, float, float] | None:
        if self.m0_exact is None:
            return None
        out = []
        for got, want in ((self.m0, self.m0_exact), (self.m2, self.m2_exact), (self.m4, self.m4_exact)):
            out.append(abs(got - want) / abs(want) if want != 0 else abs(got))
        return tuple(out)

    def summary(self) -> dict[str, object]:
        d = {"mu": self.mu, "m0": self.m0, "m2": self.m2, "m4": self.m4}
        if self.m0_exact is not None:
            d.update(m0_exact=self.m0_exact, m2_exact=self.m2_exact, m4_exact=self.m4_exact)
            e0, e2, e4 = self.rel_errors
            d.update(rel_error_m0=e0, rel_error_m2=e2, rel_error_m4=e4)
        return d


def discrete_moments(U: np.ndarray, mesh: RadialMesh) -> tuple[float, float, float]:
    r = mesh.unknown_nodes
    return tuple(weighted_inner_product(r**k, U, mesh) for k in (0, 2, 4))


def check_moments(solve: SolveResult, model: ModelSpec, mesh: RadialMesh) -> MomentReport:
    m0, m2, m4 = discrete_moments(solve.U, mesh)
    exact = (None, None, None)
    if isinstance(model.potential, Quadratic) and isinstance(model.source, Indicator):
        exact = exact_moments(model, solve.mu)
    return MomentReport(solve.mu, m0, m2, m4, *exact)


def moment_convergence(
    model: ModelSpec, mu: float, n_intervals: list[int], radius: float = 1.0, **assemble_kw
) -> tuple[list[MomentReport], np.ndarray]:
    """Moment reports on successively refined meshes and observed orders.

    Orders are ``log2(e_k / e_{k+1})`` per moment for consecutive meshes, which
    assumes each mesh halves the previous spacing.
    """
    reports = []
    for n in n_intervals:
        mesh = build_mesh(n, model.dim, radius)
        sys = assemble(model, mesh, **assemble_kw)
        reports.append(check_moments(solve_primal(sys, model, mu), model, mesh))
    errs = np.array([rep.rel_errors for rep in reports])
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log(errs[:-1] / errs[1:]) / np.log(
            np.array(n_intervals[1:], dtype=float) / np.array(n_intervals[:-1])
        )[:, None]
    return reports, orders


# -- large-mu asymptote ----------------------------------------------------------


def concentration_length(curvature: float, mu: float) -> float:
    return 1.0 / math.sqrt(curvature * mu)


def nodes_in_core(mesh: RadialMesh, curvature: float, mu: float) -> int:
    """Nodes (origin included) with ``r <= (curvature * mu)^(-1/2)``."""
    length = concentration_length(curvature, mu)
    return int(math.floor(length / mesh.h * (1 + 1e-12))) + 1


def required_intervals(curvature: float, mu: float, radius: float = 1.0, min_nodes: int = 10) -> int:
    """Smallest ``N`` with ``min_nodes`` nodes inside the concentration length."""
    length = concentration_length(curvature, mu)
    return int(math.ceil((min_nodes - 1) * radius / length * (1 - 1e-12)))


@dataclass(frozen=True)
class AsymptoteReport:
    mu_samples: np.ndarray
    ratio: np.ndarray
    predicted_slope: float
    rel_deviation: np.ndarray
    nodes_in_core: np.ndarray
    resolved: np.ndarray

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.rel_deviation) < 0))

    @property
    def eventually_decreasing(self) -> bool:
        d = np.diff(self.rel_deviation)
        return bool(len(d) and d[-1] < 0)

    def rows(self):
        return zip(self.mu_samples, self.ratio, self.rel_deviation, self.nodes_in_core,
                   self.resolved.astype(int))

    def summary(self) -> dict[str, object]:
        return {
            "predicted_slope": self.predicted_slope,
            "final_ratio": float(self.ratio[-1]),
            "final_rel_deviation": float(self.rel_deviation[-1]),
            "deviation_decreasing": self.decreasing,
            "all_resolved": bool(np.all(self.resolved)),
        }


def predicted_slope(model: ModelSpec) -> float:
    """``delta(0) <S> / gamma`` in the radial measure."""
    delta0 = float(model.kernel.value(0.0, model.dim))
    return delta0 * source_moment(model, 0) / model.gamma


def check_asymptote(
    model: ModelSpec,
    mesh: RadialMesh,
    mu_samples,
    sys: AssembledSystem | None = None,
    min_nodes: int = 10,
) -> AsymptoteReport:
    """Compare ``F(mu)/mu`` with its large-mu limit on the given mesh."""
    mu_samples = np.asarray(mu_samples, dtype=float)
    sys = sys or assemble(model, mesh)
    slope = predicted_slope(model)
    ratio = np.array([solve_primal(sys, model, mu).f_value / mu for mu in mu_samples])
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.abs(ratio - slope) / slope if slope > 0 else np.abs(ratio)
    curv = curvature_scale(model, mesh, check_hypotheses(model, mesh))
    if curv is None:
        core = np.zeros(len(mu_samples), dtype=int)
        resolved = np.zeros(len(mu_samples), dtype=bool)
    else:
        core = np.array([nodes_in_core(mesh, curv, mu) for mu in mu_samples])
        resolved = core >= min_nodes
    if not resolved.all():
        bad = mu_samples[~resolved]
        warnings.warn(
            f"mesh with N={mesh.n_intervals} does not resolve the concentration scale "
            f"for mu in {bad.tolist()}",
            ResolutionWarning,
            stacklevel=2,
        )
    return AsymptoteReport(mu_samples, ratio, slope, dev, core, resolved)
