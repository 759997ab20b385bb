"""Sampled fields on rectangular grids and their residual diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class FieldSample:
    """Values on an (x, t) or (x, y) grid; ``values[i, j]`` sits at (axis0[i], axis1[j])."""

    x_grid: np.ndarray
    t_grid: np.ndarray
    values: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    axes: tuple = ("x", "t")

    def __post_init__(self):
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.t_grid = np.asarray(self.t_grid, dtype=float)
        self.values = np.asarray(self.values)
        if self.values.shape != (len(self.x_grid), len(self.t_grid)):
            raise ValueError("field shape does not match its grids")

    @property
    def y_grid(self):
        return self.t_grid

    def slice_t(self, t):
        j = int(np.argmin(np.abs(self.t_grid - t)))
        return self.values[:, j]


def rel_l2(a, b):
    """Relative discrete L2 distance ||a - b|| / ||b||."""
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / (nb if nb > 0 else 1.0))


def _uniform(grid):
    d = np.diff(grid)
    return len(grid) >= 3 and np.allclose(d, d[0], rtol=1e-9, atol=1e-12)


def schrodinger_residual(values, x, t, u):
    """max |i q_t + q_xx + u q| / max |q| by central differences (interior points)."""
    if not (_uniform(x) and _uniform(t)):
        return float("nan")
    dx, dt = x[1] - x[0], t[1] - t[0]
    q = values
    qt = (q[1:-1, 2:] - q[1:-1, :-2]) / (2 * dt)
    qxx = (q[2:, 1:-1] - 2 * q[1:-1, 1:-1] + q[:-2, 1:-1]) / dx**2
    r = 1j * qt + qxx + u(x[1:-1])[:, None] * q[1:-1, 1:-1]
    scale = float(np.max(np.abs(q))) or 1.0
    return float(np.max(np.abs(r), initial=0.0) / scale)


def laplace_residual(values, x, y, u):
    """max |q_xx + q_yy + u q| / max |q| by central differences (interior points)."""
    if not (_uniform(x) and _uniform(y)):
        return float("nan")
    dx, dy = x[1] - x[0], y[1] - y[0]
    q = values
    qxx = (q[2:, 1:-1] - 2 * q[1:-1, 1:-1] + q[:-2, 1:-1]) / dx**2
    qyy = (q[1:-1, 2:] - 2 * q[1:-1, 1:-1] + q[1:-1, :-2]) / dy**2
    r = qxx + qyy + u(x[1:-1])[:, None] * q[1:-1, 1:-1]
    scale = float(np.max(np.abs(q))) or 1.0
    return float(np.max(np.abs(r), initial=0.0) / scale)


def one_sided_derivative(values, grid, axis=0):
    """Second-order one-sided derivative at the first grid point along ``axis``."""
    h = grid[1] - grid[0]
    v = np.moveaxis(values, axis, 0)
    return (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
