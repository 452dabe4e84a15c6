"""Uniform grids on the unit interval/square and energy-consistent operators.

The discrete curvature map ``K`` sends interior values to second differences
at every node, eliminating ghost values with the clamped-end rules
``u_0 = u_{n+1} = 0`` and the even reflection ``u_{-1} = u_1``.  The clamped
biharmonic is the plain normal product ``B = K^T K``; because every node
carries the same quadrature weight, the identity

    <B u, v>_quadrature == <K u, K v>_quadrature

holds exactly, which is what makes the downstream energy balance a
machine-precision statement instead of an O(h^p) one.  Gradients are forward
differences onto cell midpoints, so weighted Laplacians ``-G^T diag(a) G``
are symmetric negative semidefinite for any nonnegative midpoint weights.

2-D operators are tensor products of the 1-D factors on the unit square.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import InvalidDampingError, InvalidGridError

__all__ = [
    "Grid",
    "DiscreteOperators",
    "build_grid_1d",
    "build_grid_2d",
    "second_difference_map",
    "gradient_map",
    "biharmonic",
    "weighted_laplacian",
    "midpoint_count",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid over the unit interval (1-D) or unit square (2-D).

    ``shape`` holds the number of interior points per axis; the spacing per
    axis is ``1/(n+1)`` so the domain is exactly the unit interval/square.
    """

    shape: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.shape)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(1.0 / (n + 1) for n in self.shape)

    @property
    def node_weight(self) -> float:
        """Quadrature weight of a single node (h in 1-D, hx*hy in 2-D)."""
        return float(np.prod(self.spacing))

    @property
    def ndof(self) -> int:
        return int(np.prod(self.shape))

    def nodes(self, axis: int = 0) -> np.ndarray:
        """Interior node coordinates along one axis.

        Computed as i/(n+1), not i*h: each coordinate is then the correctly
        rounded rational, so support-edge membership behaves like the exact
        arithmetic it stands for.
        """
        n = self.shape[axis]
        return np.arange(1, n + 1) / (n + 1)

    def midpoints(self, axis: int = 0) -> np.ndarray:
        """Cell midpoint coordinates along one axis (n+1 of them)."""
        n = self.shape[axis]
        return (2 * np.arange(n + 1) + 1) / (2 * (n + 1))


def build_grid_1d(n: int) -> Grid:
    """Interval grid with n interior points, h = 1/(n+1)."""
    if n < 3:
        raise InvalidGridError(f"need at least 3 interior points, got n={n}")
    return Grid(shape=(int(n),))


def build_grid_2d(nx: int, ny: int) -> Grid:
    """Tensor grid on the unit square with nx*ny interior points."""
    if nx < 3 or ny < 3:
        raise InvalidGridError(
            f"need at least 3 interior points per axis, got nx={nx}, ny={ny}"
        )
    return Grid(shape=(int(nx), int(ny)))


def _second_difference_1d(n: int, h: float) -> sp.csr_matrix:
    """(n+2) x n curvature map with clamped ghost elimination."""
    rows, cols, vals = [0], [0], [2.0]  # node 0: (u_{-1} - 2*0 + u_1)/h^2 = 2 u_1/h^2
    for i in range(1, n + 1):
        if i >= 2:
            rows.append(i)
            cols.append(i - 2)
            vals.append(1.0)
        rows.append(i)
        cols.append(i - 1)
        vals.append(-2.0)
        if i <= n - 1:
            rows.append(i)
            cols.append(i)
            vals.append(1.0)
    rows.append(n + 1)
    cols.append(n - 1)
    vals.append(2.0)
    data = np.asarray(vals) / h**2
    return sp.csr_matrix((data, (rows, cols)), shape=(n + 2, n))


def _forward_difference_1d(n: int, h: float) -> sp.csr_matrix:
    """(n+1) x n forward difference onto midpoints, zero boundary values."""
    rows, cols, vals = [], [], []
    for m in range(n + 1):
        if m >= 1:
            rows.append(m)
            cols.append(m - 1)
            vals.append(-1.0)
        if m <= n - 1:
            rows.append(m)
            cols.append(m)
            vals.append(1.0)
    data = np.asarray(vals) / h
    return sp.csr_matrix((data, (rows, cols)), shape=(n + 1, n))


def _zero_pad(n: int) -> sp.csr_matrix:
    """(n+2) x n extension of interior values by the boundary zeros."""
    return sp.vstack(
        [sp.csr_matrix((1, n)), sp.eye(n, format="csr"), sp.csr_matrix((1, n))]
    ).tocsr()


def second_difference_map(grid: Grid) -> sp.csr_matrix:
    """Curvature at all nodes from interior values.

    1-D: (n+2) x n second differences.  2-D: discrete Laplacian at all
    (nx+2)(ny+2) nodes, built as K1 (x) Z + Z (x) K1 from the 1-D factors.
    """
    if grid.dimension == 1:
        return _second_difference_1d(grid.shape[0], grid.spacing[0])
    nx, ny = grid.shape
    hx, hy = grid.spacing
    kx = _second_difference_1d(nx, hx)
    ky = _second_difference_1d(ny, hy)
    return (sp.kron(kx, _zero_pad(ny)) + sp.kron(_zero_pad(nx), ky)).tocsr()


def gradient_map(grid: Grid) -> sp.csr_matrix:
    """Forward-difference gradient onto cell midpoints, stacked per axis.

    1-D: (n+1) x n.  2-D: x-derivatives at (nx+1)*ny midpoints stacked on
    top of y-derivatives at nx*(ny+1) midpoints.
    """
    if grid.dimension == 1:
        return _forward_difference_1d(grid.shape[0], grid.spacing[0])
    nx, ny = grid.shape
    hx, hy = grid.spacing
    gx = sp.kron(_forward_difference_1d(nx, hx), sp.eye(ny))
    gy = sp.kron(sp.eye(nx), _forward_difference_1d(ny, hy))
    return sp.vstack([gx, gy]).tocsr()


def midpoint_count(grid: Grid) -> int:
    """Number of midpoint degrees of freedom the gradient map produces."""
    if grid.dimension == 1:
        return grid.shape[0] + 1
    nx, ny = grid.shape
    return (nx + 1) * ny + nx * (ny + 1)


def biharmonic(grid: Grid) -> sp.csr_matrix:
    """Clamped biharmonic B = K^T K (symmetric positive definite)."""
    k = second_difference_map(grid)
    return (k.T @ k).tocsr()


def weighted_laplacian(grid: Grid, a_mid: np.ndarray) -> sp.csr_matrix:
    """Weighted Laplacian -G^T diag(a_mid) G; negative semidefinite.

    ``a_mid`` holds nonnegative midpoint values, one per gradient output row
    (n+1 in 1-D, stacked per axis in 2-D).
    """
    a_mid = np.asarray(a_mid, dtype=float)
    expected = midpoint_count(grid)
    if a_mid.shape != (expected,):
        raise InvalidDampingError(
            f"midpoint weights must have shape ({expected},), got {a_mid.shape}"
        )
    if np.any(a_mid < 0):
        raise InvalidDampingError("midpoint weights must be nonnegative")
    g = gradient_map(grid)
    return (-(g.T @ sp.diags(a_mid) @ g)).tocsr()


@dataclass(frozen=True)
class DiscreteOperators:
    """Bundle of the operators every downstream module consumes.

    Immutable after construction; safe to share across parallel workers.
    """

    grid: Grid

    @cached_property
    def second_difference(self) -> sp.csr_matrix:
        return second_difference_map(self.grid)

    @cached_property
    def gradient(self) -> sp.csr_matrix:
        return gradient_map(self.grid)

    @cached_property
    def biharmonic(self) -> sp.csr_matrix:
        k = self.second_difference
        return (k.T @ k).tocsr()

    def weighted_laplacian(self, a_mid: np.ndarray) -> sp.csr_matrix:
        return weighted_laplacian(self.grid, a_mid)
