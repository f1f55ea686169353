"""Inversion of the constraint ``F(mu) = ell`` and monotonicity scans of ``F``."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assembly import AssembledSystem
from .model import ModelSpec
from .solver import evaluate


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    NO_BRACKET = "NoBracket"
    NON_MONOTONE_WARNING = "NonMonotoneWarning"


@dataclass(frozen=True)
class MonotonicityScan:
    mu_grid: np.ndarray
    f_values: np.ndarray
    fprime_values: np.ndarray
    sign_changes: list[tuple[float, float]]

    @property
    def monotone(self) -> bool:
        return not self.sign_changes

    def crossings(self, ell: float) -> list[tuple[float, float]]:
        """Grid intervals where ``F - ell`` changes sign (or hits zero)."""
        d = self.f_values - ell
        out = []
        for i in range(len(d) - 1):
            if d[i] == 0.0 or d[i] * d[i + 1] < 0:
                out.append((float(self.mu_grid[i]), float(self.mu_grid[i + 1])))
        if len(d) and d[-1] == 0.0:
            out.append((float(self.mu_grid[-1]), float(self.mu_grid[-1])))
        return out

    def rows(self):
        return zip(self.mu_grid, self.f_values, self.fprime_values)


@dataclass
class InversionReport:
    ell: float
    mu_found: float
    f_at_mu: float
    bracket: tuple[float, float]
    n_solves: int
    status: Status
    doublings: int = 0
    newton_steps: int = 0
    bisection_steps: int = 0
    tol_f: float = 0.0
    history: list[tuple[float, float]] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is not Status.NO_BRACKET

    def summary(self) -> dict[str, object]:
        return {
            "ell": self.ell,
            "mu_found": self.mu_found,
            "f_at_mu": self.f_at_mu,
            "bracket_lo": self.bracket[0],
            "bracket_hi": self.bracket[1],
            "n_solves": self.n_solves,
            "doublings": self.doublings,
            "newton_steps": self.newton_steps,
            "bisection_steps": self.bisection_steps,
            "tol_f": self.tol_f,
            "status": self.status.value,
        }


def mu_grid(mu_lo: float, mu_hi: float, n_samples: int) -> np.ndarray:
    """Log-spaced samples, or linear when ``mu_lo == 0``."""
    if not (0 <= mu_lo < mu_hi):
        raise ValueError(f"need 0 <= mu_lo < mu_hi, got {mu_lo!r}, {mu_hi!r}")
    if n_samples < 3:
        raise ValueError(f"n_samples must be >= 3, got {n_samples!r}")
    if mu_lo == 0:
        return np.linspace(0.0, mu_hi, n_samples)
    return np.logspace(math.log10(mu_lo), math.log10(mu_hi), n_samples)


def _sign_changes(grid: np.ndarray, values: np.ndarray) -> list[tuple[float, float]]:
    # zeros carry no sign; compare each nonzero sample with the previous nonzero one
    out = []
    prev = None
    for i, v in enumerate(values):
        if v == 0.0:
            continue
        s = v > 0
        if prev is not None and s != prev[1]:
            out.append((float(grid[prev[0]]), float(grid[i])))
        prev = (i, s)
    return out


def scan_monotonicity(
    sys: AssembledSystem,
    model: ModelSpec,
    mu_lo: float,
    mu_hi: float,
    n_samples: int,
    workers: int | None = None,
) -> MonotonicityScan:
    """Sample ``F`` and ``F'`` and report the grid intervals where ``F'`` flips sign."""
    grid = mu_grid(mu_lo, mu_hi, n_samples)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            pairs = list(pool.map(lambda mu: evaluate(sys, model, mu), grid))
    else:
        pairs = [evaluate(sys, model, mu) for mu in grid]
    f = np.array([p[0] for p in pairs])
    fp = np.array([p[1] for p in pairs])
    return MonotonicityScan(grid, f, fp, _sign_changes(grid, fp))


def invert(
    sys: AssembledSystem,
    model: ModelSpec,
    ell: float,
    mu_max: float = 1e8,
    tol_f: float | None = None,
    scan: MonotonicityScan | None = None,
    max_iter: int = 200,
) -> InversionReport:
    """Find ``mu`` with ``|F(mu) - ell| <= tol_f``.

    The bracket is grown by doubling from ``mu = 1``; the root is then refined by
    Newton steps on the exact discrete ``F'``, falling back to bisection whenever
    the Newton iterate leaves the bracket. When a ``scan`` is given and crosses
    ``ell``, its first crossing interval is the bracket, so for non-monotone ``F``
    the smallest root is returned up to the scan resolution; without a scan the
    root lies in the first bracket reached by doubling. A scan with sign changes
    downgrades a converged status to ``NonMonotoneWarning``.
    """
    if not ell >= 0:
        raise ValueError(f"ell must be non-negative, got {ell!r}")
    if tol_f is None:
        tol_f = 1e-8 * max(1.0, ell)
    if not tol_f > 0:
        raise ValueError(f"tol_f must be positive, got {tol_f!r}")

    if ell == 0:
        return InversionReport(ell, 0.0, 0.0, (0.0, 0.0), 0, Status.CONVERGED, tol_f=tol_f)

    n_solves = 0
    history: list[tuple[float, float]] = []

    def fval(mu):
        nonlocal n_solves
        n_solves += 1
        f, fp = evaluate(sys, model, mu)
        history.append((mu, f))
        return f - ell, fp

    # a scan supplies the bracket of the smallest crossing directly
    crossings = scan.crossings(ell) if scan is not None else []
    doublings = 0
    if crossings:
        lo, hi = crossings[0]
        f_hi, fp_hi = fval(hi)
    else:
        lo, hi = 0.0, 1.0  # F(0) = 0 < ell
    while not crossings:
        f_hi, fp_hi = fval(hi)
        if f_hi >= 0:
            break
        lo = hi
        if hi > mu_max:
            return InversionReport(
                ell, hi, f_hi + ell, (lo, hi), n_solves, Status.NO_BRACKET,
                doublings=doublings, tol_f=tol_f, history=history,
            )
        hi *= 2.0
        doublings += 1

    bracket = (lo, hi)
    mu, f, fp = hi, f_hi, fp_hi
    newton = bisect = 0
    for _ in range(max_iter):
        if abs(f) <= tol_f:
            break
        if f < 0:
            lo = mu
        else:
            hi = mu
        step_ok = fp > 0 and np.isfinite(fp)
        cand = mu - f / fp if step_ok else math.nan
        if step_ok and lo < cand < hi:
            mu = cand
            newton += 1
        else:
            mu = 0.5 * (lo + hi)
            bisect += 1
        f, fp = fval(mu)
        if hi - lo <= 4 * np.finfo(float).eps * max(hi, 1.0):
            break

    status = Status.CONVERGED if abs(f) <= tol_f else Status.NO_BRACKET
    if status is Status.CONVERGED and scan is not None and not scan.monotone:
        status = Status.NON_MONOTONE_WARNING
    return InversionReport(
        ell, mu, f + ell, bracket, n_solves, status,
        doublings=doublings, newton_steps=newton, bisection_steps=bisect,
        tol_f=tol_f, history=history,
    )
