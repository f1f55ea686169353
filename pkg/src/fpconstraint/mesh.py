"""Uniform radial mesh with P1 hat functions in the measure r^(n-1) dr."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class HatBasis:
    """Piecewise-linear hat attached to node ``index``.

    Node 0 carries the half-hat on ``[0, h]``.
    """

    index: int
    h: float
    radius: float

    @property
    def support(self) -> tuple[float, float]:
        lo = max(0.0, (self.index - 1) * self.h)
        hi = min(self.radius, (self.index + 1) * self.h)
        return lo, hi

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        x = r / self.h - self.index
        val = np.clip(1.0 - np.abs(x), 0.0, None)
        lo, hi = self.support
        return np.where((r >= lo) & (r <= hi), val, 0.0)


@dataclass(frozen=True)
class RadialMesh:
    """``n_intervals + 1`` equispaced nodes on ``[0, radius]``.

    Unknowns live on nodes ``0 .. n_intervals - 1``; the last node carries the
    homogeneous Dirichlet condition.
    """

    n_intervals: int
    dim: int
    radius: float = 1.0

    @property
    def n_nodes(self) -> int:
        return self.n_intervals + 1

    @property
    def n_unknowns(self) -> int:
        return self.n_intervals

    @property
    def h(self) -> float:
        return self.radius / self.n_intervals

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.h

    @property
    def unknown_nodes(self) -> np.ndarray:
        return self.nodes[: self.n_unknowns]

    @property
    def midpoints(self) -> np.ndarray:
        return self.nodes[:-1] + 0.5 * self.h

    def basis(self, j: int) -> HatBasis:
        if not 0 <= j < self.n_nodes:
            raise IndexError(f"node index {j} outside 0..{self.n_nodes - 1}")
        return HatBasis(j, self.h, self.radius)

    def cell_rule(self, n_points: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Gauss-Legendre rule on every cell.

        Returns ``(r, t, w)``: physical points of shape ``(n_intervals, n_points)``,
        reference coordinates ``t`` in ``[0, 1]`` and weights scaled by ``h``.
        An ``n_points`` rule integrates polynomials of degree ``2 n_points - 1``
        exactly.
        """
        x, w = np.polynomial.legendre.leggauss(n_points)
        t = 0.5 * (x + 1.0)
        r = self.nodes[:-1, None] + self.h * t[None, :]
        return r, t, 0.5 * w * self.h

    def exact_rule_points(self, extra_degree: int = 0) -> int:
        """Points needed to integrate ``r^(n-1) * p`` exactly for deg p <= 2 + extra."""
        degree = self.dim - 1 + 2 + extra_degree
        return degree // 2 + 1


def build_mesh(n_intervals: int, dim: int, radius: float = 1.0) -> RadialMesh:
    if int(n_intervals) != n_intervals or n_intervals < 2:
        raise ValueError(f"n_intervals must be an integer >= 2, got {n_intervals!r}")
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dim must be an integer >= 1, got {dim!r}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius!r}")
    return RadialMesh(int(n_intervals), int(dim), float(radius))


def weighted_inner_product(f_nodal, g_nodal, mesh: RadialMesh) -> float:
    """``f^T A g`` with ``A`` the P1 mass matrix in the measure ``r^(n-1) dr``.

    Vectors hold one value per unknown node.
    """
    from .assembly import mass_matrix

    f = np.asarray(f_nodal, dtype=float)
    g = np.asarray(g_nodal, dtype=float)
    m = mesh.n_unknowns
    if f.shape != (m,) or g.shape != (m,):
        raise ValueError(
            f"expected vectors of length {m}, got {f.shape} and {g.shape}"
        )
    A = mass_matrix(mesh)
    # written symmetrically so that swapping f and g is bitwise exact
    cross = f[:-1] * g[1:] + f[1:] * g[:-1]
    return float(np.sum(A.diag * (f * g)) + np.sum(A.upper * cross))
