"""Finite-difference reference solvers.

Nothing here touches the spectral machinery; the schemes only need the
potential as a plain function so that they stay independent witnesses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import CubicSpline
from scipy.sparse.linalg import splu

from .errors import LinearSolveFailure
from .fields import FieldSample

LEAKAGE_LIMIT = 1e-6


@dataclass(frozen=True)
class OracleConfig:
    """Grid spacings and truncation extents (``dt`` doubles as ``dy`` for Laplace)."""

    dx: float = 0.01
    dt: float = 1e-3
    x_max: float = 60.0
    t_max: float = 1.0
    boundary_truncation: str = "dirichlet_zero"

    def __post_init__(self):
        if not (self.dx > 0 and self.dt > 0 and self.x_max > 0 and self.t_max > 0):
            raise ValueError("oracle spacings and extents must be positive")
        if self.boundary_truncation not in ("dirichlet_zero", "extrapolated"):
            raise ValueError("boundary_truncation must be 'dirichlet_zero' or 'extrapolated'")

    def refined(self, factor=2):
        return OracleConfig(self.dx / factor, self.dt / factor, self.x_max, self.t_max,
                            self.boundary_truncation)


# -- Schrodinger ---------------------------------------------------------------

@dataclass
class SchrodingerOracleResult:
    """Field on the scheme grid plus both boundary traces at every time step."""

    x: np.ndarray
    t: np.ndarray              # every time level
    saved: np.ndarray          # indices into t of the stored columns
    values: np.ndarray         # (Nx, len(saved))
    q_boundary: np.ndarray     # q(0, t) for all t
    qx_boundary: np.ndarray    # q_x(0, t) for all t
    leakage: float
    dx: float
    dt: float
    diagnostics: dict = field(default_factory=dict)

    def _column_index(self, t):
        ts = self.t[self.saved]
        idx = np.searchsorted(ts, t)
        idx = np.clip(idx, 0, len(ts) - 1)
        lo = np.clip(idx - 1, 0, len(ts) - 1)
        idx = np.where(np.abs(ts[lo] - t) < np.abs(ts[idx] - t), lo, idx)
        if np.any(np.abs(ts[idx] - t) > 1e-9 + 1e-9 * np.abs(t)):
            raise ValueError("requested time is not a stored time level")
        return idx

    def columns(self, t):
        return self.values[:, self._column_index(np.atleast_1d(np.asarray(t, dtype=float)))]

    def boundary_q(self, t):
        return np.interp(t, self.t, self.q_boundary.real) + 1j * np.interp(t, self.t, self.q_boundary.imag)

    def boundary_qx(self, t):
        return np.interp(t, self.t, self.qx_boundary.real) + 1j * np.interp(t, self.t, self.qx_boundary.imag)

    def sample(self, x_grid, t_grid):
        """FieldSample on an output grid (cubic interpolation in x if off-grid)."""
        cols = self.columns(t_grid)
        x_grid = np.asarray(x_grid, dtype=float)
        j = np.rint(x_grid / self.dx).astype(int)
        if np.allclose(j * self.dx, x_grid, atol=1e-9):
            vals = cols[j]
        else:
            vals = CubicSpline(self.x, cols, axis=0)(x_grid)
        return FieldSample(x_grid, np.asarray(t_grid, dtype=float), vals,
                           {"oracle_dx": self.dx, "oracle_dt": self.dt, "leakage": self.leakage})

    def mass(self):
        w = np.full(len(self.x), self.dx)
        w[[0, -1]] *= 0.5
        return w @ np.abs(self.values) ** 2


def crank_nicolson_halfline(potential, q0, boundary, bc_kind="dirichlet",
                            config=OracleConfig(), save_times=None):
    """Crank-Nicolson scheme for i q_t + q_xx + u q = 0 on [0, x_max].

    Dirichlet data enter as known boundary values; Neumann data through a
    ghost point q_{-1} = q_1 - 2 dx g1.  q = 0 at x_max.  Both are second order
    in dx and dt.  ``save_times`` selects stored columns (default: all steps,
    thinned if memory would exceed ~2e7 values).
    """
    if bc_kind not in ("dirichlet", "neumann"):
        raise ValueError("bc_kind must be 'dirichlet' or 'neumann'")
    u = potential.eval if hasattr(potential, "eval") else potential
    dx, dt = config.dx, config.dt
    N = int(round(config.x_max / dx))
    nt = int(round(config.t_max / dt))
    x = dx * np.arange(N + 1)
    t = dt * np.arange(nt + 1)
    g = lambda s: np.asarray(boundary(np.atleast_1d(s)), dtype=complex)
    gt = g(t)
    if save_times is None:
        stride = max(1, int(np.ceil((N + 1) * (nt + 1) / 2e7)))
        saved = np.arange(0, nt + 1, stride)
        if saved[-1] != nt:
            saved = np.append(saved, nt)
    else:
        saved = np.unique(np.rint(np.asarray(save_times, dtype=float) / dt).astype(int))
        if np.any(np.abs(saved * dt - np.asarray(sorted(set(save_times)))) > 1e-9):
            raise ValueError("save_times must be multiples of dt")
    # unknowns: j = 1..N-1 (Dirichlet) or j = 0..N-1 (Neumann)
    first = 1 if bc_kind == "dirichlet" else 0
    xs = x[first:N]
    n = len(xs)
    main = -2.0 / dx**2 + u(xs)
    off = np.full(n - 1, 1.0 / dx**2)
    upper = off.copy()
    if bc_kind == "neumann":
        upper[0] = 2.0 / dx**2
    A = sp.diags([off, main, upper], [-1, 0, 1], format="csc", dtype=complex)
    I = sp.identity(n, format="csc", dtype=complex)
    lhs = (I - 0.5j * dt * A).tocsc()
    rhs = (I + 0.5j * dt * A).tocsr()
    try:
        lu = splu(lhs)
    except RuntimeError as exc:
        raise LinearSolveFailure(str(exc)) from exc

    def source(step):
        c = np.zeros(n, dtype=complex)
        if bc_kind == "dirichlet":
            c[0] = gt[step] / dx**2
        else:
            c[0] = -2.0 * gt[step] / dx
        return c

    q = np.asarray(q0(xs), dtype=complex)
    store = np.zeros((N + 1, len(saved)), dtype=complex)
    qb = np.zeros(nt + 1, dtype=complex)
    qxb = np.zeros(nt + 1, dtype=complex)
    leak = 0.0

    def full(vec, step):
        out = np.zeros(N + 1, dtype=complex)
        out[first:N] = vec
        if bc_kind == "dirichlet":
            out[0] = gt[step]
        return out

    slot = {s: i for i, s in enumerate(saved)}
    c_prev = source(0)
    for step in range(nt + 1):
        if step > 0:
            c_next = source(step)
            q = lu.solve(rhs @ q + 0.5j * dt * (c_prev + c_next))
            if not np.all(np.isfinite(q)):
                raise LinearSolveFailure("non-finite values in the Crank-Nicolson solve")
            c_prev = c_next
        f = full(q, step)
        if bc_kind == "dirichlet":
            qb[step] = gt[step]
            qxb[step] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * dx)
        else:
            qb[step] = f[0]
            qxb[step] = gt[step]
        leak = max(leak, float(abs(f[N - 1])))
        if step in slot:
            store[:, slot[step]] = f
    if leak > LEAKAGE_LIMIT:
        warnings.warn(f"oracle boundary leakage {leak:.2e} exceeds {LEAKAGE_LIMIT:g}", stacklevel=2)
    return SchrodingerOracleResult(x, t, saved, store, qb, qxb, leak, dx, dt,
                                   {"leakage": leak, "x_max": config.x_max})


def exact_free_gaussian(x, t, center, beta=1.0):
    """Free evolution of exp(-(x-c)^2 / (4 beta)) under i q_t + q_xx = 0."""
    x = np.asarray(x, dtype=float)[:, None]
    s = beta + 1j * np.asarray(t, dtype=float)[None, :]
    return np.sqrt(beta / s) * np.exp(-((x - center) ** 2) / (4 * s))


# -- Laplace -------------------------------------------------------------------

@dataclass(frozen=True)
class LaplaceOracleConfig:
    """Graded tensor mesh: spacing ``h`` up to ``uniform_extent``, then cells
    growing by ``1 + growth * h`` until ``far_extent`` where q = 0 is imposed."""

    h: float = 0.05
    uniform_extent: float = 8.0
    far_extent: float = 20000.0
    growth: float = 1.0

    def __post_init__(self):
        if not (0 < self.h < self.uniform_extent < self.far_extent and self.growth > 0):
            raise ValueError("need 0 < h < uniform_extent < far_extent and growth > 0")

    def refined(self, factor=2):
        return LaplaceOracleConfig(self.h / factor, self.uniform_extent, self.far_extent,
                                   self.growth)

    def mesh(self):
        n = int(round(self.uniform_extent / self.h))
        pts = list(self.h * np.arange(n + 1))
        step, r = self.h, 1.0 + self.growth * self.h
        while pts[-1] < self.far_extent:
            step *= r
            pts.append(pts[-1] + step)
        return np.array(pts)


def _second_difference(z):
    """Rows of the 3-point second-derivative stencil at interior nodes of z."""
    hl = z[1:-1] - z[:-2]
    hr = z[2:] - z[1:-1]
    return (2 / (hl * (hl + hr)), -2 / (hl * hr), 2 / (hr * (hl + hr)))


def _first_difference(z):
    hl = z[1:-1] - z[:-2]
    hr = z[2:] - z[1:-1]
    return (-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr)))


@dataclass
class LaplaceOracleResult:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray            # (Nx, Ny)
    config: LaplaceOracleConfig
    diagnostics: dict = field(default_factory=dict)

    def sample(self, x_grid, y_grid):
        from scipy.interpolate import RegularGridInterpolator
        x_grid = np.asarray(x_grid, dtype=float)
        y_grid = np.asarray(y_grid, dtype=float)
        ix = np.searchsorted(self.x, x_grid)
        iy = np.searchsorted(self.y, y_grid)
        ix = np.clip(ix, 0, len(self.x) - 1)
        iy = np.clip(iy, 0, len(self.y) - 1)
        if np.allclose(self.x[ix], x_grid, atol=1e-9) and np.allclose(self.y[iy], y_grid, atol=1e-9):
            vals = self.values[np.ix_(ix, iy)]
        else:
            interp = RegularGridInterpolator((self.x, self.y), self.values, method="cubic")
            X, Y = np.meshgrid(x_grid, y_grid, indexing="ij")
            vals = interp(np.stack([X.ravel(), Y.ravel()], axis=1)).reshape(X.shape)
        return FieldSample(x_grid, y_grid, vals, {"oracle_h": self.config.h}, axes=("x", "y"))

    # boundary traces (one-sided second-order differences)
    @property
    def q_bottom(self):
        return self.values[:, 0]

    @property
    def qy_bottom(self):
        h = self.y[1] - self.y[0]
        return (-3 * self.values[:, 0] + 4 * self.values[:, 1] - self.values[:, 2]) / (2 * h)

    @property
    def q_left(self):
        return self.values[0, :]

    @property
    def qx_left(self):
        h = self.x[1] - self.x[0]
        return (-3 * self.values[0, :] + 4 * self.values[1, :] - self.values[2, :]) / (2 * h)


def laplace_fd_quarterplane(potential, f, g, beta=0.0, gamma1=-1.0, gamma2=0.0,
                            config=LaplaceOracleConfig(), source=None):
    """Second-order finite differences for q_xx + q_yy + u q = 0 on a graded mesh.

    q_y + gamma1 q = f on y = 0 and q_x + beta q_y + gamma2 q = g on x = 0 use
    one-sided normal differences (the corner takes the y = 0 condition);
    q = 0 on the far edges.  ``source(x, y)``, if given, replaces the zero
    right-hand side of the interior equation.
    """
    u = potential.eval if hasattr(potential, "eval") else potential
    z = config.mesh()
    n = len(z)
    idx = np.arange(n * n).reshape(n, n)  # idx[i, j] <-> (x_i, y_j)
    rows, cols, vals = [], [], []
    rhs = np.zeros(n * n)

    def add(r, c, v):
        rows.append(np.ravel(r))
        cols.append(np.ravel(c))
        vals.append(np.ravel(np.broadcast_to(v, np.shape(r))))

    lo, mid, hi = _second_difference(z)
    I = np.arange(1, n - 1)
    Ii, Jj = np.meshgrid(I, I, indexing="ij")
    center = idx[Ii, Jj]
    uz = u(z[1:-1])
    add(center, center, mid[:, None] + mid[None, :] + uz[:, None])
    add(center, idx[Ii - 1, Jj], lo[:, None])
    add(center, idx[Ii + 1, Jj], hi[:, None])
    add(center, idx[Ii, Jj - 1], lo[None, :])
    add(center, idx[Ii, Jj + 1], hi[None, :])
    if source is not None:
        rhs[center.ravel()] = np.ravel(source(z[Ii], z[Jj]))
    h = z[1] - z[0]
    # y = 0 (including the corner)
    ib = np.arange(0, n - 1)
    r = idx[ib, 0]
    add(r, idx[ib, 0], -3 / (2 * h) + gamma1)
    add(r, idx[ib, 1], 4 / (2 * h))
    add(r, idx[ib, 2], -1 / (2 * h))
    rhs[r] = f(z[ib])
    # x = 0
    jb = np.arange(1, n - 1)
    r = idx[0, jb]
    add(r, idx[0, jb], -3 / (2 * h) + gamma2)
    add(r, idx[1, jb], 4 / (2 * h))
    add(r, idx[2, jb], -1 / (2 * h))
    if beta != 0.0:
        dl, dc, dr = _first_difference(z)
        add(r, idx[0, jb - 1], beta * dl)
        add(r, idx[0, jb], beta * dc)
        add(r, idx[0, jb + 1], beta * dr)
    rhs[r] = g(z[jb])
    # far edges
    far = np.unique(np.concatenate([idx[n - 1, :], idx[:, n - 1]]))
    add(far, far, 1.0)
    A = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n * n, n * n))
    try:
        sol = splu(A).solve(rhs)
    except RuntimeError as exc:
        raise LinearSolveFailure(str(exc)) from exc
    if not np.all(np.isfinite(sol)):
        raise LinearSolveFailure("non-finite values in the quarter-plane solve")
    q = sol.reshape(n, n)
    return LaplaceOracleResult(z, z, q, config, {"unknowns": n * n, "mesh_points": n})
