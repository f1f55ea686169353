"""Problem data (potential, constraint kernel, source, death rate) and checks.

All data are radial functions of ``r`` on the mesh interval. Presets are
evaluated in closed form; tabulated variants hold nodal values on a uniform
grid and are linearly interpolated in between.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .mesh import RadialMesh


class ConfigError(ValueError):
    """Malformed model configuration."""


def _interp(values: np.ndarray, r_max: float, r) -> np.ndarray:
    grid = np.linspace(0.0, r_max, len(values))
    return np.interp(np.asarray(r, dtype=float), grid, values)


# -- potentials ---------------------------------------------------------------


@dataclass(frozen=True)
class Quadratic:
    """``Phi(r) = a r^2``."""

    a: float = 2.0

    def value(self, r):
        return self.a * np.asarray(r, dtype=float) ** 2

    def d1(self, r):
        return 2.0 * self.a * np.asarray(r, dtype=float)

    def d2(self, r):
        return np.full_like(np.asarray(r, dtype=float), 2.0 * self.a)

    def describe(self) -> str:
        return f"quadratic:{self.a!r}"


@dataclass(frozen=True)
class DoubleWell:
    """``Phi(r) = a r^2 (r - r_c)^2``, minima at 0 and ``r_c``."""

    a: float = 2.0
    r_c: float = 0.2

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return self.a * r**2 * (r - self.r_c) ** 2

    def d1(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * self.a * r * (r - self.r_c) * (2.0 * r - self.r_c)

    def d2(self, r):
        r = np.asarray(r, dtype=float)
        c = self.r_c
        return 2.0 * self.a * ((r - c) * (2.0 * r - c) + r * (2.0 * r - c) + 2.0 * r * (r - c))

    def describe(self) -> str:
        return f"doublewell:{self.a!r}:{self.r_c!r}"


@dataclass(frozen=True, eq=False)
class TabulatedPotential:
    """Nodal tables of ``Phi``, ``Phi'`` and ``Phi''`` on ``[0, r_max]``."""

    phi: np.ndarray
    dphi: np.ndarray
    d2phi: np.ndarray
    r_max: float = 1.0

    def __post_init__(self):
        if not len(self.phi) == len(self.dphi) == len(self.d2phi):
            raise ValueError("potential tables must have equal lengths")

    @property
    def n_values(self) -> int:
        return len(self.phi)

    def value(self, r):
        return _interp(self.phi, self.r_max, r)

    def d1(self, r):
        return _interp(self.dphi, self.r_max, r)

    def d2(self, r):
        return _interp(self.d2phi, self.r_max, r)

    def describe(self) -> str:
        return f"tabulated:{self.n_values}"


Potential = Union[Quadratic, DoubleWell, TabulatedPotential]


# -- constraint kernels ------------------------------------------------------


def _heat_norm(eps: float, dim: int) -> float:
    return (4.0 * math.pi * eps) ** (-dim / 2.0)


@dataclass(frozen=True)
class GaussianAtOrigin:
    """``delta(r) = exp(-r^2/eps) / (4 pi eps)^(n/2)``."""

    eps: float = 1e-3

    def value(self, r, dim: int):
        r = np.asarray(r, dtype=float)
        return _heat_norm(self.eps, dim) * np.exp(-(r**2) / self.eps)

    def d1(self, r, dim: int):
        r = np.asarray(r, dtype=float)
        return -2.0 * r / self.eps * self.value(r, dim)

    def describe(self) -> str:
        return f"gauss0:{self.eps!r}"


@dataclass(frozen=True)
class ShiftedGaussian:
    """``delta(r) = exp(-(r - r1)^2/eps) / (4 pi eps)^(n/2)``."""

    eps: float = 1e-3
    r1: float = 0.05

    def value(self, r, dim: int):
        r = np.asarray(r, dtype=float)
        return _heat_norm(self.eps, dim) * np.exp(-((r - self.r1) ** 2) / self.eps)

    def d1(self, r, dim: int):
        r = np.asarray(r, dtype=float)
        return -2.0 * (r - self.r1) / self.eps * self.value(r, dim)

    def describe(self) -> str:
        return f"gauss:{self.eps!r}:{self.r1!r}"


@dataclass(frozen=True)
class QuarticTail:
    """``delta(r) = eps r^4``; vanishes at the origin."""

    eps: float = 1e-3

    def value(self, r, dim: int):
        return self.eps * np.asarray(r, dtype=float) ** 4

    def d1(self, r, dim: int):
        return 4.0 * self.eps * np.asarray(r, dtype=float) ** 3

    def describe(self) -> str:
        return f"quartic:{self.eps!r}"


@dataclass(frozen=True, eq=False)
class TabulatedKernel:
    values: np.ndarray
    r_max: float = 1.0

    @property
    def n_values(self) -> int:
        return len(self.values)

    def value(self, r, dim: int):
        return _interp(self.values, self.r_max, r)

    def d1(self, r, dim: int):
        grid = np.linspace(0.0, self.r_max, len(self.values))
        return np.interp(np.asarray(r, dtype=float), grid, np.gradient(self.values, grid))

    def describe(self) -> str:
        return f"tabulated:{self.n_values}"


Kernel = Union[GaussianAtOrigin, ShiftedGaussian, QuarticTail, TabulatedKernel]


# -- sources -------------------------------------------------------------------


@dataclass(frozen=True)
class Indicator:
    """``S = 1`` on ``[lo, hi]``, zero elsewhere."""

    lo: float = 0.3
    hi: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.lo < self.hi:
            raise ValueError(f"indicator needs 0 <= lo < hi, got [{self.lo}, {self.hi}]")

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return ((r >= self.lo) & (r <= self.hi)).astype(float)

    def moment(self, k: int, dim: int) -> float:
        """Closed form of ``int S r^k r^(n-1) dr``."""
        p = k + dim
        return (self.hi**p - self.lo**p) / p

    def describe(self) -> str:
        return f"indicator:{self.lo!r}:{self.hi!r}"


@dataclass(frozen=True, eq=False)
class TabulatedSource:
    values: np.ndarray
    r_max: float = 1.0

    @property
    def n_values(self) -> int:
        return len(self.values)

    def value(self, r):
        return _interp(self.values, self.r_max, r)

    def describe(self) -> str:
        return f"tabulated:{self.n_values}"


Source = Union[Indicator, TabulatedSource]


# -- model -----------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    potential: Potential = field(default_factory=Quadratic)
    kernel: Kernel = field(default_factory=GaussianAtOrigin)
    source: Source = field(default_factory=Indicator)
    gamma: float = 1.0
    dim: int = 3

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")

    def describe(self) -> dict[str, str]:
        return {
            "potential": self.potential.describe(),
            "kernel": self.kernel.describe(),
            "source": self.source.describe(),
            "gamma": repr(float(self.gamma)),
            "dim": str(self.dim),
        }


@dataclass(frozen=True)
class ModelTables:
    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    delta: np.ndarray
    source: np.ndarray


def evaluate_model(model: ModelSpec, mesh: RadialMesh) -> ModelTables:
    """Nodal values of ``Phi``, ``Phi'``, ``delta`` and ``S`` on all mesh nodes."""
    for part in (model.potential, model.kernel, model.source):
        n_values = getattr(part, "n_values", None)
        if n_values is not None and n_values != mesh.n_nodes:
            raise ValueError(
                f"{type(part).__name__} has {n_values} values, mesh has {mesh.n_nodes} nodes"
            )
    r = mesh.nodes
    return ModelTables(
        r=r,
        phi=model.potential.value(r),
        dphi=model.potential.d1(r),
        delta=model.kernel.value(r, model.dim),
        source=model.source.value(r),
    )


# -- hypothesis checks ---------------------------------------------------------


@dataclass(frozen=True)
class HypothesisReport:
    """Sampled verdicts on the confinement and compatibility hypotheses.

    ``*_at`` fields hold the first sampled radius violating the condition, or
    ``None``.
    """

    hphi_ok: bool
    lambda_est: float
    m_est: float
    hphi_at: float | None
    grad_origin_ok: bool
    phi_nonneg: bool
    phi_nonneg_at: float | None
    hcm_ok: bool
    dphi_nonneg: bool
    dphi_nonneg_at: float | None
    d2phi_nonneg: bool
    d2phi_nonneg_at: float | None
    ddelta_nonpos: bool
    ddelta_nonpos_at: float | None
    delta_positive_near_origin: bool
    delta_origin: float

    def as_dict(self) -> dict[str, object]:
        return dict(self.__dict__)


def _first_violation(r: np.ndarray, bad: np.ndarray) -> float | None:
    idx = np.flatnonzero(bad)
    return float(r[idx[0]]) if idx.size else None


def check_hypotheses(model: ModelSpec, mesh: RadialMesh) -> HypothesisReport:
    r = np.sort(np.concatenate([mesh.nodes, mesh.midpoints]))
    pot = model.potential
    phi, d1, d2 = pot.value(r), pot.d1(r), pot.d2(r)

    # radial Hessian eigenvalues: Phi'' and Phi'/r (the latter -> Phi''(0) at 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tangential = np.where(r > 0, d1 / np.where(r > 0, r, 1.0), d2)
    eig_min = np.minimum(d2, tangential)
    eig_max = np.maximum(d2, tangential)
    lam, big = float(eig_min.min()), float(eig_max.max())
    scale = max(float(np.max(np.abs(d1))), float(np.max(np.abs(d2))), 1e-300)
    tol = 1e-12 * scale

    grad_origin_ok = abs(float(pot.d1(0.0))) <= tol
    hphi_bad = eig_min <= 0
    hphi_ok = bool(lam > 0 and grad_origin_ok)

    phi_bad = phi < -1e-12 * max(float(np.max(np.abs(phi))), 1e-300)

    delta = model.kernel.value(r, model.dim)
    ddelta = model.kernel.d1(r, model.dim)
    dtol = 1e-12 * max(float(np.max(np.abs(ddelta))), 1e-300)
    dphi_bad = d1 < -tol
    d2phi_bad = d2 < -tol
    ddelta_bad = ddelta > dtol

    # positivity near the origin: delta >= delta(0)/2 on [0, 5h]
    delta0 = float(model.kernel.value(0.0, model.dim))
    core = r <= 5.0 * mesh.h * (1 + 1e-12)
    near_ok = bool(delta0 > 0 and np.all(delta[core] >= 0.5 * delta0))

    return HypothesisReport(
        hphi_ok=hphi_ok,
        lambda_est=lam,
        m_est=big,
        hphi_at=_first_violation(r, hphi_bad),
        grad_origin_ok=grad_origin_ok,
        phi_nonneg=not phi_bad.any(),
        phi_nonneg_at=_first_violation(r, phi_bad),
        hcm_ok=not (dphi_bad.any() or d2phi_bad.any() or ddelta_bad.any()),
        dphi_nonneg=not dphi_bad.any(),
        dphi_nonneg_at=_first_violation(r, dphi_bad),
        d2phi_nonneg=not d2phi_bad.any(),
        d2phi_nonneg_at=_first_violation(r, d2phi_bad),
        ddelta_nonpos=not ddelta_bad.any(),
        ddelta_nonpos_at=_first_violation(r, ddelta_bad),
        delta_positive_near_origin=near_ok,
        delta_origin=delta0,
    )


def curvature_scale(model: ModelSpec, mesh: RadialMesh, report: HypothesisReport | None = None):
    """Curvature used for the concentration length ``(curv * mu)^(-1/2)``.

    The sampled lower Hessian bound when it is positive, else ``Phi''(0)`` if
    positive, else ``None`` (no concentration at the origin to resolve).
    """
    report = report or check_hypotheses(model, mesh)
    if report.lambda_est > 0:
        return report.lambda_est
    c0 = float(model.potential.d2(0.0))
    return c0 if c0 > 0 else None


# -- config parsing --------------------------------------------------------------

_KNOWN_KEYS = ("potential", "kernel", "source", "gamma", "dim", "n_intervals", "radius")


def _floats(parts: list[str], n: int, what: str) -> list[float]:
    if len(parts) != n:
        raise ValueError(f"{what} expects {n} parameter(s), got {len(parts)}")
    return [float(p) for p in parts]


def parse_potential(text: str) -> Potential:
    kind, *args = text.split(":")
    if kind == "quadratic":
        return Quadratic(*_floats(args, 1, kind))
    if kind == "doublewell":
        return DoubleWell(*_floats(args, 2, kind))
    raise ValueError(f"unknown potential kind {kind!r}")


def parse_kernel(text: str) -> Kernel:
    kind, *args = text.split(":")
    if kind == "gauss0":
        return GaussianAtOrigin(*_floats(args, 1, kind))
    if kind == "gauss":
        return ShiftedGaussian(*_floats(args, 2, kind))
    if kind == "quartic":
        return QuarticTail(*_floats(args, 1, kind))
    raise ValueError(f"unknown kernel kind {kind!r}")


def parse_source(text: str) -> Source:
    kind, *args = text.split(":")
    if kind == "indicator":
        return Indicator(*_floats(args, 2, kind))
    raise ValueError(f"unknown source kind {kind!r}")


@dataclass(frozen=True)
class RunConfig:
    model: ModelSpec
    n_intervals: int | None = None
    radius: float = 1.0


def parse_config(text: str) -> RunConfig:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    raw: dict[str, str] = {}
    lines: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown or malformed entry: {line!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}: {line!r}")
        raw[key] = value
        lines[key] = (lineno, line)

    def convert(key, fn, default):
        if key not in raw:
            return default
        try:
            return fn(raw[key])
        except ValueError as exc:
            lineno, line = lines[key]
            raise ConfigError(f"line {lineno}: {exc}: {line!r}") from exc

    def as_int(s: str) -> int:
        v = float(s)
        if v != int(v):
            raise ValueError(f"expected an integer, got {s!r}")
        return int(v)

    model_kwargs = {
        "potential": convert("potential", parse_potential, Quadratic()),
        "kernel": convert("kernel", parse_kernel, GaussianAtOrigin()),
        "source": convert("source", parse_source, Indicator()),
        "gamma": convert("gamma", float, 1.0),
        "dim": convert("dim", as_int, 3),
    }
    try:
        model = ModelSpec(**model_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(
        model=model,
        n_intervals=convert("n_intervals", as_int, None),
        radius=convert("radius", float, 1.0),
    )


def format_config(model: ModelSpec, n_intervals: int | None = None, radius: float = 1.0) -> str:
    lines = [f"{k}={v}" for k, v in model.describe().items()]
    if n_intervals is not None:
        lines.append(f"n_intervals={n_intervals}")
    if radius != 1.0:
        lines.append(f"radius={radius!r}")
    return "\n".join(lines) + "\n"
