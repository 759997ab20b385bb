"""Spectral transforms of initial data and time transforms of boundary data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import OverflowRisk, QuadratureFailure
from .potentials import effective_support
from .quadrature import GAUSS_WEIGHTS, KRONROD_NODES, KRONROD_WEIGHTS

# |exp(i k^2 t)| beyond exp(OVERFLOW_EXPONENT) is refused
OVERFLOW_EXPONENT = 500.0
DEFAULT_STEP = 0.02
_FILON_DEGREE = 5


def as_callable(g):
    """Accept a callable or a ``(samples_t, samples_g)`` table (cubic interpolant)."""
    if callable(g):
        return lambda t: np.asarray(g(np.asarray(t, dtype=float)), dtype=complex)
    ts, gs = (np.asarray(v) for v in g)
    re = CubicSpline(ts, np.real(gs))
    im = CubicSpline(ts, np.imag(gs))
    lo, hi = ts[0], ts[-1]

    def interp(t):
        t = np.clip(np.asarray(t, dtype=float), lo, hi)
        return re(t) + 1j * im(t)

    return interp


def real_parts(fn):
    """Scalar callables for Re fn and Im fn, as consumed by the Jost sweeps."""
    def part(take):
        def w(x):
            v = take(np.asarray(fn(np.atleast_1d(np.asarray(x, dtype=float))), dtype=complex))
            return v if np.ndim(x) else float(v[0])
        return w

    re, im = part(np.real), part(np.imag)

    return re, im


# -- initial transforms -----------------------------------------------------

@dataclass
class InitialTransforms:
    """phi-type (or Phi-type) and psi transforms of q0 on a k grid."""

    k: np.ndarray
    hat_q0: np.ndarray
    tilde_q0: np.ndarray


def _combine(integrals):
    return integrals[:, 0] + 1j * integrals[:, 1]


def initial_transforms(q0, jost, k, variant="half_line"):
    """Integrals of q0 against phi (Phi for the full-line variant) and psi.

    The phi transform is only requested for real k; the psi transform is
    valid for Im k >= 0.
    """
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    data = real_parts(q0)
    s_psi = jost.sweep(k, "psi", [0.0], data)
    kind = "phi" if variant == "half_line" else "Phi"
    s_phi = jost.sweep(k, kind, [0.0], data)
    return InitialTransforms(k, _combine(s_phi.integrals), _combine(s_psi.integrals))


# -- time transforms ---------------------------------------------------------

def _check_growth(k2, t):
    growth = -np.imag(k2) * t
    if np.any(growth > OVERFLOW_EXPONENT):
        raise OverflowRisk(
            f"exp(i k^2 t) grows like exp({float(np.max(growth)):.1f}); k lies outside "
            "the region where the time transform is bounded"
        )


def _gk_time_integral(g, k2, t0, t1, tol, max_panels):
    """Oscillation-aware GK15 quadrature of exp(i k2 tau) g(tau) over [t0, t1]."""
    span = t1 - t0
    if span <= 0:
        return 0j, 0.0
    width = np.pi / (4 * abs(np.real(k2)) + 1e-300)
    n = int(max(1, np.ceil(span / min(width, span))))
    while True:
        edges = np.linspace(t0, t1, n + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1:] - edges[:-1])
        tau = (mid[:, None] + half[:, None] * KRONROD_NODES[None, :])
        f = np.exp(1j * k2 * tau) * g(tau.ravel()).reshape(tau.shape) * half[:, None]
        vk = f @ KRONROD_WEIGHTS
        vg = f @ GAUSS_WEIGHTS
        err = float(np.sum(np.abs(vk - vg)))
        if err <= tol or n > max_panels:
            if err > tol:
                raise QuadratureFailure("time transform did not converge",
                                        value=complex(vk.sum()), error_estimate=err)
            return complex(vk.sum()), err
        n *= 2


def time_transform(g, k, t, order=0, tol=1e-12, max_panels=2**20):
    """Integral of exp(i k^2 tau) g(tau) over [0, t], one k at a time.

    ``order`` only labels the datum (0 for q(0, t), 1 for q_x(0, t)).  Panels
    span at most a quarter of an oscillation of exp(i Re(k^2) tau).
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    g = as_callable(g)
    k = np.asarray(k, dtype=complex)
    out = np.empty(k.shape, dtype=complex)
    for idx, kv in np.ndenumerate(k):
        k2 = kv * kv
        _check_growth(k2, t)
        out[idx] = _gk_time_integral(g, k2, 0.0, float(t), tol, max_panels)[0]
    return out if out.ndim else complex(out)


def decay_horizon(g, tol=1e-14, start=1.0):
    """Time beyond which |g| stays below ``tol`` times its sampled maximum."""
    g = as_callable(g)
    scale = float(np.max(np.abs(g(np.linspace(0.0, start, 257))))) or 1.0
    return effective_support(lambda s: np.abs(g(s)) / scale, tol, start=start)


def time_transform_inf(g, k, horizon=None, tol=1e-12):
    """Infinite-horizon transform, truncated where g has decayed."""
    g = as_callable(g)
    T = decay_horizon(g) if horizon is None else float(horizon)
    k = np.asarray(k, dtype=complex)
    if np.any(np.imag(k * k) < -1e-14):
        raise OverflowRisk("infinite-horizon transform needs Im(k^2) >= 0")
    out = np.empty(k.shape, dtype=complex)
    for idx, kv in np.ndenumerate(k):
        out[idx] = _gk_time_integral(g, kv * kv, 0.0, T, tol, 2**22)[0]
    return out if out.ndim else complex(out)


# -- bulk time transforms (exponential-moment rule) ----------------------------

_NODES = 0.5 * (1 - np.cos(np.pi * np.arange(_FILON_DEGREE + 1) / _FILON_DEGREE))
_VINV_T = np.linalg.inv(np.vander(_NODES, increasing=True)).T


def _moments(theta, deg=_FILON_DEGREE):
    """Integrals of exp(i theta s) s^m over [0, 1], m = 0..deg."""
    theta = np.asarray(theta, dtype=complex)
    mu = np.empty(theta.shape + (deg + 1,), dtype=complex)
    small = np.abs(theta) < 5.0
    if np.any(small):
        th = theta[small]
        j = np.arange(80)
        fact = np.cumprod(np.concatenate([[1.0], np.arange(1, 80, dtype=float)]))
        terms = (1j * th[:, None]) ** j[None, :] / fact[None, :]
        for m in range(deg + 1):
            mu[small, m] = terms @ (1.0 / (j + m + 1))
    big = ~small
    if np.any(big):
        th = theta[big]
        e = np.exp(1j * th)
        prev = (e - 1) / (1j * th)
        mu[big, 0] = prev
        for m in range(1, deg + 1):
            prev = (e - m * prev) / (1j * th)
            mu[big, m] = prev
    return mu


def _panel_grid(t_grid, step):
    """Panels whose edges contain every requested time."""
    ts = np.unique(np.concatenate([[0.0], np.asarray(t_grid, dtype=float)]))
    starts, widths, marks = [], [], [0]
    for a, b in zip(ts[:-1], ts[1:]):
        n = max(1, int(np.ceil((b - a) / step - 1e-9)))
        h = (b - a) / n
        starts.extend(a + h * np.arange(n))
        widths.extend([h] * n)
        marks.append(len(starts))
    return ts, np.array(starts), np.array(widths), np.array(marks)


@dataclass
class TimeTransformTable:
    """Time transforms on a (k, t) grid with an error estimate."""

    k: np.ndarray
    t: np.ndarray
    values: np.ndarray
    error_estimate: float


def _bulk(g, k2, t_grid, step, chunk):
    ts, starts, widths, marks = _panel_grid(t_grid, step)
    samples = g((starts[:, None] + widths[:, None] * _NODES[None, :]).ravel())
    samples = samples.reshape(len(starts), -1)
    uw, inv = np.unique(widths, return_inverse=True)
    out = np.zeros((len(k2), len(ts)), dtype=complex)
    for lo in range(0, len(k2), chunk):
        kk = k2[lo:lo + chunk]
        W = np.empty((len(kk), len(starts), _FILON_DEGREE + 1), dtype=complex)
        for i, h in enumerate(uw):
            Wh = _moments(kk * h) @ _VINV_T.T  # (nk, nodes)
            W[:, inv == i, :] = Wh[:, None, :] * h
        panel = np.einsum("kpn,pn->kp", W, samples) * np.exp(1j * np.outer(kk, starts))
        csum = np.concatenate([np.zeros((len(kk), 1)), np.cumsum(panel, axis=1)], axis=1)
        out[lo:lo + chunk] = csum[:, marks]
    pos = np.searchsorted(ts, np.asarray(t_grid, dtype=float))
    return out[:, pos]


def time_transform_grid(g, k, t_grid, step=DEFAULT_STEP, chunk=512):
    """Transforms for every k and every t in ``t_grid`` in one pass.

    g is replaced on each panel by its degree-5 interpolant at Chebyshev-Lobatto
    points and the exponential moments are integrated exactly, so the cost
    does not grow with k.  The error estimate compares against doubled panels.
    """
    g = as_callable(g)
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid < 0):
        raise ValueError("times must be nonnegative")
    k2 = k * k
    _check_growth(k2, float(t_grid.max(initial=0.0)))
    fine = _bulk(g, k2, t_grid, step, chunk)
    coarse = _bulk(g, k2, t_grid, 2 * step, chunk)
    err = float(np.max(np.abs(fine - coarse), initial=0.0)) / 63.0
    return TimeTransformTable(k, t_grid, fine, err)


def time_transform_inf_grid(g, k, horizon=None, step=DEFAULT_STEP):
    """Infinite-horizon transforms of a decaying g for many k."""
    g = as_callable(g)
    T = decay_horizon(g) if horizon is None else float(horizon)
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    if np.any(np.imag(k * k) < -1e-14):
        raise OverflowRisk("infinite-horizon transform needs Im(k^2) >= 0")
    tab = time_transform_grid(g, k, [T], step)
    return tab.values[:, 0], tab.error_estimate


def filon_linear(z, v, k):
    """Integral of exp(i k z) v(z) over the grid z with v piecewise linear.

    Exact for the interpolant whatever the size of k times the cell, so coarse
    far-field cells do not alias the oscillation.  ``v`` is (N,) or (nk, N);
    the result has one entry per k.
    """
    z = np.asarray(z, dtype=float)
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    v = np.asarray(v, dtype=complex)
    if v.ndim == 1:
        v = np.broadcast_to(v, (len(k), len(z)))
    h = np.diff(z)
    mu = _moments(np.outer(k, h), deg=1)            # (nk, cells, 2)
    w_right = mu[..., 1]
    w_left = mu[..., 0] - mu[..., 1]
    phase = np.exp(1j * np.outer(k, z[:-1])) * h
    return np.sum(phase * (w_left * v[:, :-1] + w_right * v[:, 1:]), axis=1)
