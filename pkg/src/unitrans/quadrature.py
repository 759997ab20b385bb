"""Numerical kernels: contour quadrature, ODE integration and root brackets.

All contours are finite.  Callers pick the truncation; nothing here guesses
where an integrand has become negligible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import IntegrationFailure, QuadratureFailure

# Gauss-Kronrod 7/15 pair on [-1, 1] (QUADPACK values).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

KRONROD_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
# Gauss weights scattered onto the Kronrod node set (zero at Kronrod-only nodes).
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1::2] = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]


@dataclass(frozen=True)
class Segment:
    """A straight line or circular arc, parametrized over u in [0, 1]."""

    kind: str
    start: complex
    end: complex
    center: complex = 0j
    theta0: float = 0.0
    theta1: float = 0.0

    @classmethod
    def line(cls, start, end):
        return cls("line", complex(start), complex(end))

    @classmethod
    def arc(cls, center, radius, theta0, theta1):
        c = complex(center)
        return cls(
            "arc",
            c + radius * np.exp(1j * theta0),
            c + radius * np.exp(1j * theta1),
            c,
            float(theta0),
            float(theta1),
        )

    @property
    def radius(self):
        return abs(self.start - self.center)

    @property
    def length(self):
        if self.kind == "line":
            return abs(self.end - self.start)
        return self.radius * abs(self.theta1 - self.theta0)

    def point(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "line":
            return self.start + u * (self.end - self.start)
        th = self.theta0 + u * (self.theta1 - self.theta0)
        return self.center + self.radius * np.exp(1j * th)

    def jacobian(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "line":
            return np.full(u.shape, self.end - self.start, dtype=complex)
        th = self.theta0 + u * (self.theta1 - self.theta0)
        return 1j * self.radius * np.exp(1j * th) * (self.theta1 - self.theta0)


@dataclass(frozen=True)
class Indentation:
    center: complex
    radius: float
    side: str  # "right" (Re k larger than the pole) or "left"


@dataclass
class Contour:
    """Connected chain of segments, traversed in list order."""

    segments: list
    indentations: list = field(default_factory=list)
    orientation: str = "forward"

    def __post_init__(self):
        for s0, s1 in zip(self.segments, self.segments[1:]):
            if abs(s0.end - s1.start) > 1e-12 * max(1.0, abs(s0.end)):
                raise ValueError("contour segments are not connected")
        for ind in self.indentations:
            if ind.radius <= 0:
                raise ValueError("indentation radius must be positive")
        for i, a in enumerate(self.indentations):
            for b in self.indentations[i + 1:]:
                if abs(a.center - b.center) <= a.radius + b.radius:
                    raise ValueError("indentations overlap")

    @property
    def length(self):
        return sum(s.length for s in self.segments)

    def gk15_nodes(self, panels_per_segment):
        """Fixed-panel Kronrod nodes.

        Returns ``(k, wk, wg)``: nodes, Kronrod weights and embedded Gauss weights,
        both already multiplied by the path Jacobian.
        """
        if np.isscalar(panels_per_segment):
            panels_per_segment = [int(panels_per_segment)] * len(self.segments)
        ks, wks, wgs = [], [], []
        for seg, n in zip(self.segments, panels_per_segment):
            edges = np.linspace(0.0, 1.0, int(n) + 1)
            mid = 0.5 * (edges[1:] + edges[:-1])
            half = 0.5 * (edges[1:] - edges[:-1])
            u = (mid[:, None] + half[:, None] * KRONROD_NODES[None, :]).ravel()
            jac = seg.jacobian(u) * np.repeat(half, 15)
            ks.append(seg.point(u))
            wks.append(jac * np.tile(KRONROD_WEIGHTS, len(mid)))
            wgs.append(jac * np.tile(GAUSS_WEIGHTS, len(mid)))
        return np.concatenate(ks), np.concatenate(wks), np.concatenate(wgs)


def imaginary_ray_with_indents(top, poles, radii, side="right"):
    """Segments running down the imaginary axis from ``i*top`` to 0.

    Each pole ``i*p`` is bypassed by a half circle on the requested side.
    """
    segs = []
    current = top
    order = np.argsort(poles)[::-1]
    sign = -1.0 if side == "right" else 1.0
    for idx in order:
        p, r = float(poles[idx]), float(radii[idx])
        if not (0 < p - r and p + r < current):
            raise ValueError("indentation does not fit on the ray")
        segs.append(Segment.line(1j * current, 1j * (p + r)))
        # downward travel; "right" swings through Re k > 0 (theta: pi/2 -> -pi/2)
        segs.append(Segment.arc(1j * p, r, np.pi / 2, np.pi / 2 + sign * np.pi))
        current = p - r
    segs.append(Segment.line(1j * current, 0.0))
    return segs


@dataclass
class QuadratureResult:
    value: complex
    error_estimate: float
    panels_used: int


def integrate_contour(integrand, contour, tol=1e-10, max_panels=20000, initial=4):
    """Locally adaptive Gauss-Kronrod quadrature of ``integrand`` over ``contour``.

    ``integrand`` maps a 1-D array of k to an array whose leading axis matches;
    extra axes are integrated componentwise (error uses the max norm).
    Panels whose Kronrod/Gauss difference exceeds their share of ``tol`` are
    bisected, and all pending panels of a round are evaluated in one batch.
    """
    total_len = contour.length
    pending = []
    for seg in contour.segments:
        edges = np.linspace(0.0, 1.0, initial + 1)
        pending.extend((seg, a, b) for a, b in zip(edges[:-1], edges[1:]))
    value = 0.0
    err_total = 0.0
    used = 0
    while pending:
        if used + len(pending) > max_panels:
            raise QuadratureFailure(
                "panel budget exhausted", value=value, error_estimate=err_total
            )
        us, jacs = [], []
        for seg, a, b in pending:
            half = 0.5 * (b - a)
            u = 0.5 * (a + b) + half * KRONROD_NODES
            us.append(seg.point(u))
            jacs.append(seg.jacobian(u) * half)
        k = np.concatenate(us)
        f = np.asarray(integrand(k))
        f = f.reshape((len(pending), 15) + f.shape[1:])
        jac = np.stack(jacs).reshape((len(pending), 15) + (1,) * (f.ndim - 2))
        fk = np.tensordot(KRONROD_WEIGHTS, np.moveaxis(f * jac, 1, 0), axes=1)
        fg = np.tensordot(GAUSS_WEIGHTS, np.moveaxis(f * jac, 1, 0), axes=1)
        err = np.abs(fk - fg)
        if err.ndim > 1:
            err = err.reshape(len(pending), -1).max(axis=1)
        nxt = []
        for i, (seg, a, b) in enumerate(pending):
            share = tol * max(seg.length * (b - a) / total_len, 1e-3 / max_panels)
            if err[i] <= share or (b - a) < 1e-12:
                value = value + fk[i]
                err_total += float(err[i])
                used += 1
            else:
                m = 0.5 * (a + b)
                nxt.extend([(seg, a, m), (seg, m, b)])
        pending = nxt
    return QuadratureResult(value, err_total, used)


def integrate_ode(rhs, x0, x1, state0, tol=1e-10, x_eval=None, atol=None):
    """Adaptive embedded-pair (Dormand-Prince 8(5,3)) integration.

    Works in either direction and with complex state.  Returns the state at
    ``x1``, or at each point of ``x_eval`` when given (shape ``(n_state, n_eval)``).
    """
    y0 = np.asarray(state0)
    if atol is None:
        atol = tol * 1e-2
    if x0 == x1:
        if x_eval is None:
            return y0.copy()
        return np.repeat(y0[:, None], len(np.atleast_1d(x_eval)), axis=1)
    sol = solve_ivp(
        rhs, (x0, x1), y0, method="DOP853", rtol=tol, atol=atol,
        t_eval=x_eval, vectorized=False,
    )
    if not sol.success:
        raise IntegrationFailure(sol.message)
    if x_eval is None:
        return sol.y[:, -1]
    return sol.y


def bracket_roots(f, interval, max_roots=50, n_scan=400, xtol=1e-12, values=None):
    """Sign-change scan plus Brent refinement.

    ``f`` may be vectorized; the scan grid is evaluated in one call.  Roots of
    even multiplicity produce no sign change and are missed.
    """
    lo, hi = interval
    grid = np.linspace(lo, hi, n_scan + 1)
    vals = np.asarray(f(grid) if values is None else values, dtype=float)
    roots = []
    for i in range(n_scan):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(grid[i])
        elif a * b < 0:
            roots.append(brentq(lambda p: float(np.real(f(np.array([p]))[0])),
                                grid[i], grid[i + 1], xtol=xtol, rtol=1e-15))
        if len(roots) >= max_roots:
            break
    if vals[-1] == 0.0 and len(roots) < max_roots:
        roots.append(grid[-1])
    return roots


def central_derivative(f, x, h):
    """Fourth-order central difference of a vectorized ``f`` at a point."""
    pts = x + h * np.array([-2.0, -1.0, 1.0, 2.0])
    v = f(pts)
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)
