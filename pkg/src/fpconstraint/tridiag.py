"""Tridiagonal matrices stored as three diagonals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded


class SolverError(RuntimeError):
    """Raised when a banded solve breaks down or returns non-finite values."""


@dataclass(frozen=True)
class Tridiagonal:
    """Square tridiagonal matrix.

    ``lower[i]`` holds entry ``(i + 1, i)`` and ``upper[i]`` holds ``(i, i + 1)``;
    both have length ``size - 1``.
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        m = len(self.diag)
        if len(self.lower) != m - 1 or len(self.upper) != m - 1:
            raise ValueError(
                f"off-diagonals must have length {m - 1}, got "
                f"{len(self.lower)} and {len(self.upper)}"
            )

    @property
    def size(self) -> int:
        return len(self.diag)

    @property
    def T(self) -> "Tridiagonal":
        return Tridiagonal(self.upper, self.diag, self.lower)

    def __add__(self, other: "Tridiagonal") -> "Tridiagonal":
        return Tridiagonal(
            self.lower + other.lower, self.diag + other.diag, self.upper + other.upper
        )

    def __sub__(self, other: "Tridiagonal") -> "Tridiagonal":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "Tridiagonal":
        return Tridiagonal(scalar * self.lower, scalar * self.diag, scalar * self.upper)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.size,):
            raise ValueError(f"expected vector of length {self.size}, got {v.shape}")
        out = self.diag * v
        out[:-1] += self.upper * v[1:]
        out[1:] += self.lower * v[:-1]
        return out

    def quadratic_form(self, v: np.ndarray) -> float:
        return float(np.dot(v, self.matvec(v)))

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.upper, 1)
            + np.diag(self.lower, -1)
        )

    def banded(self) -> np.ndarray:
        """Matrix in LAPACK ``(1, 1)`` banded layout."""
        ab = np.zeros((3, self.size))
        ab[0, 1:] = self.upper
        ab[1] = self.diag
        ab[2, :-1] = self.lower
        return ab

    def matvec_extended(self, x: np.ndarray) -> np.ndarray:
        """``T x`` accumulated in ``np.longdouble``."""
        ld = np.longdouble
        x = np.asarray(x, dtype=ld)
        out = self.diag.astype(ld) * x
        out[:-1] += self.upper.astype(ld) * x[1:]
        out[1:] += self.lower.astype(ld) * x[:-1]
        return out

    def residual_extended(self, x: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """``rhs - T x`` accumulated in ``np.longdouble``."""
        return np.asarray(rhs, dtype=np.longdouble) - self.matvec_extended(x)

    def solve(
        self,
        rhs: np.ndarray,
        refine: int = 1,
        apply_extended: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> np.ndarray:
        """Banded LU solve with mixed-precision iterative refinement.

        Residuals are formed in extended precision, which recovers several
        digits lost in the elimination on convection-dominated rows.
        ``apply_extended`` computes the exact operator in extended precision
        when this matrix is only its float64 rounding.
        """
        rhs = np.asarray(rhs, dtype=float)
        if not np.any(rhs):
            return np.zeros(self.size)
        apply = apply_extended or self.matvec_extended
        ab = self.banded()
        try:
            x = solve_banded((1, 1), ab, rhs)
            xl = x.astype(np.longdouble)
            for _ in range(refine):
                res = np.asarray(rhs, dtype=np.longdouble) - apply(xl)
                xl = xl + solve_banded((1, 1), ab, res.astype(float))
            x = xl.astype(float)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SolverError(f"tridiagonal solve failed: {exc}") from exc
        if not np.all(np.isfinite(x)):
            raise SolverError("tridiagonal solve returned non-finite values")
        return x


def zeros(size: int) -> Tridiagonal:
    return Tridiagonal(np.zeros(size - 1), np.zeros(size), np.zeros(size - 1))
