"""Integration, differentiation and quadrature kernels.

Fixed-step classical RK4 (deterministic output grids make residual
cross-checks and CSV diffing trivial), central finite differences of order 2
or 4 with one-sided boundary stencils of the same order, and cumulative
composite Simpson quadrature.  All kernels are pure functions on uniform
grids.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "Trajectory",
    "PoleError",
    "rk4_integrate",
    "fd_derivative",
    "quadrature",
    "cumulative_integral_refined",
]


@dataclass(frozen=True)
class Grid:
    """Uniform grid of N cells on [z0, z1] (N + 1 nodes)."""

    z0: float
    z1: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.z0) and np.isfinite(self.z1)):
            raise ValueError("grid endpoints must be finite")
        if self.z1 <= self.z0:
            raise ValueError("grid requires z1 > z0")
        if self.N < 4:
            raise ValueError("grid requires N >= 4")

    @property
    def h(self) -> float:
        return (self.z1 - self.z0) / self.N

    def points(self) -> np.ndarray:
        return np.linspace(self.z0, self.z1, self.N + 1)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.z0, self.z1, self.N * factor)


@dataclass(frozen=True)
class Trajectory:
    """Per-node state vectors over a grid."""

    grid: Grid
    states: np.ndarray  # shape (N + 1, d)

    def __post_init__(self):
        if self.states.shape[0] != self.grid.N + 1:
            raise ValueError("trajectory length does not match grid")
        if not np.all(np.isfinite(self.states)):
            raise ValueError("trajectory contains non-finite entries")

    def column(self, i: int) -> np.ndarray:
        return self.states[:, i]


class PoleError(RuntimeError):
    """Integration produced a non-finite state; carries the usable prefix."""

    def __init__(self, last_good_z: float, partial_states: np.ndarray, grid: Grid):
        self.last_good_z = last_good_z
        self.partial_states = partial_states
        self.grid = grid
        super().__init__(
            f"non-finite state while integrating; last good point z = {last_good_z!r}"
        )


def rk4_integrate(rhs: Callable, y0, grid: Grid) -> Trajectory:
    """Classical fixed-step RK4; global error O(h^4).

    Raises PoleError (with the finite prefix of the trajectory) as soon as a
    step produces NaN/Inf, which is how pole crossings surface.
    """
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    h = grid.h
    ys = np.empty((grid.N + 1, y.size))
    ys[0] = y
    z = grid.z0
    # overflow is the pole-detection signal, not an error in itself
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(grid.N):
            k1 = np.asarray(rhs(z, y))
            k2 = np.asarray(rhs(z + 0.5 * h, y + 0.5 * h * k1))
            k3 = np.asarray(rhs(z + 0.5 * h, y + 0.5 * h * k2))
            k4 = np.asarray(rhs(z + h, y + h * k3))
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise PoleError(z, ys[: k + 1].copy(), grid)
            z = grid.z0 + (k + 1) * h
            ys[k + 1] = y
    return Trajectory(grid, ys)


# order 4 one-sided stencils (left edge; right edge uses the mirror image)
_EDGE4 = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)


def fd_derivative(samples, grid: Grid, order: int = 4) -> np.ndarray:
    """Derivative of gridded samples: central stencils in the interior,
    one-sided stencils of the same order at the boundaries.

    samples may be (N+1,) or (N+1, k); differentiation runs along axis 0.
    """
    f = np.asarray(samples, dtype=float)
    if f.shape[0] != grid.N + 1:
        raise ValueError("sample count does not match grid")
    h = grid.h
    if order == 2:
        if f.shape[0] < 3:
            raise ValueError("order-2 stencil needs at least 3 points")
        out = np.empty_like(f)
        out[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
        out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
        return out
    if order == 4:
        if f.shape[0] < 5:
            raise ValueError("order-4 stencil needs at least 5 points")
        out = np.empty_like(f)
        out[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
        for i, coeffs in enumerate(_EDGE4):
            out[i] = np.tensordot(coeffs, f[:5], axes=(0, 0)) / h
            out[-1 - i] = -np.tensordot(coeffs, f[-5:][::-1], axes=(0, 0)) / h
        return out
    raise ValueError("order must be 2 or 4")


def quadrature(samples, grid: Grid) -> np.ndarray:
    """Cumulative integral of gridded samples by composite Simpson.

    Even nodes are reached by exact Simpson pairs; odd interior nodes use the
    O(h^4) three-point half-panel rule.  An odd final cell (odd N) falls back
    to the trapezoid rule and is flagged with a warning.
    """
    f = np.asarray(samples, dtype=float)
    if f.shape[0] != grid.N + 1:
        raise ValueError("sample count does not match grid")
    h = grid.h
    n = grid.N
    out = np.zeros_like(f)
    # Simpson pairs: I[i] = I[i-2] + (h/3)(f[i-2] + 4 f[i-1] + f[i])
    for i in range(2, n + 1, 2):
        out[i] = out[i - 2] + (h / 3.0) * (f[i - 2] + 4.0 * f[i - 1] + f[i])
    # odd nodes from the quadratic through the neighbouring triple
    for i in range(1, n + 1, 2):
        if i == n:
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i])
            warnings.warn(
                "odd cell count: trapezoid fallback on the last cell",
                RuntimeWarning,
                stacklevel=2,
            )
        else:
            out[i] = out[i - 1] + (h / 12.0) * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1])
    return out


def cumulative_integral_refined(
    fn: Callable, grid: Grid, tol: float = 1e-10, max_doublings: int = 12
) -> np.ndarray:
    """Cumulative integral of a callable on the grid nodes, grid-doubled
    until two successive refinements agree to tol at the shared nodes."""
    factor = 1 if grid.N % 2 == 0 else 2
    g = grid if factor == 1 else grid.refined(2)
    vals = quadrature(fn(g.points()), g)
    for _ in range(max_doublings):
        g2 = g.refined(2)
        vals2 = quadrature(fn(g2.points()), g2)
        done = bool(np.max(np.abs(vals2[::2] - vals)) < tol)
        g, vals, factor = g2, vals2, factor * 2
        if done:
            return vals[::factor]
    raise RuntimeError(f"cumulative quadrature did not reach tol={tol}")
