"""Potentials u(x) and the initial/boundary data of both problems."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import DivergentMoment

TRUNCATION_TOL = 1e-10
_SUPPORT_CAP = 2.0**20


def effective_support(fn, tol=TRUNCATION_TOL, start=1.0, direction=1.0, cap=_SUPPORT_CAP):
    """Distance beyond which ``|fn| < tol`` on a sampled grid.

    Doubling search for a window free of large values, then bisection on the
    last sampled exceedance.  ``direction=-1`` searches toward -infinity.
    """
    def big(x):
        return np.abs(fn(direction * np.asarray(x, dtype=float))) >= tol

    X = start
    while X < cap:
        s = np.linspace(X, 2 * X, 801)
        if not big(s).any():
            break
        X *= 2
    else:
        return cap
    s = np.linspace(0.0, X, 4001)
    hits = np.nonzero(big(s))[0]
    if len(hits) == 0:
        return start
    lo, hi = s[hits[-1]], s[min(hits[-1] + 1, len(s) - 1)]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if big(np.array([mid]))[0]:
            lo = mid
        else:
            hi = mid
    return max(float(hi), start)


@dataclass(frozen=True)
class Potential:
    """A real decaying potential.  Immutable; safe to share across k sweeps.

    ``x_left`` is only meaningful for ``domain_kind == "full_line"``.
    """

    eval: Callable
    x_support: float
    moment_bound: float
    domain_kind: str = "half_line"
    x_left: float = 0.0
    name: str = "custom"
    max_value: float = 0.0

    def __call__(self, x):
        return self.eval(x)

    @property
    def is_zero(self):
        return self.name == "zero"


def _moment(fn, lo, hi):
    pts = np.linspace(lo, hi, 65)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += quad(lambda x: (1 + x * x) * abs(float(fn(np.array([x]))[0])), a, b,
                      epsabs=1e-13, epsrel=1e-11, limit=200)[0]
    return total


def _build(fn, domain_kind, name, tol=TRUNCATION_TOL):
    X = effective_support(fn, tol)
    XL = 0.0
    if domain_kind == "full_line":
        XL = -effective_support(fn, tol, direction=-1.0)
    grid = np.linspace(XL, X, 4001)
    umax = float(np.max(fn(grid))) if len(grid) else 0.0
    mb = _moment(fn, XL, X) if name != "zero" else 0.0
    return Potential(fn, X, mb, domain_kind, XL, name, max(umax, 0.0))


def zero_potential(domain_kind="half_line"):
    def u(x):
        return np.zeros_like(np.asarray(x, dtype=float))
    return Potential(u, 1.0, 0.0, domain_kind, -1.0 if domain_kind == "full_line" else 0.0,
                     "zero", 0.0)


@dataclass(frozen=True)
class Sech2Params:
    p: float
    x0: float

    def __post_init__(self):
        if not (self.p > 0 and self.x0 > 0):
            raise ValueError("sech2 potential needs p > 0 and x0 > 0")


def make_sech2(params, domain_kind="full_line", scale=1.0):
    """u(x) = scale * 2 p^2 / cosh^2(p (x - x0)); reflectionless when scale == 1."""
    p, x0 = params.p, params.x0

    def u(x):
        e = np.exp(-2 * np.abs(p * (np.asarray(x, dtype=float) - x0)))
        return scale * 8 * p * p * e / (1 + e) ** 2

    return _build(u, domain_kind, "sech2" if scale == 1.0 else "sech2_scaled")


def from_callable(fn, domain_kind="half_line", name="custom"):
    def u(x):
        return np.asarray(fn(np.asarray(x, dtype=float)), dtype=float)
    return _build(u, domain_kind, name)


def from_table(x, u, domain_kind="half_line", name="table"):
    """Cubic-spline interpolant of tabulated values; zero outside the table."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    spline = CubicSpline(x, u, bc_type="natural")
    lo, hi = x[0], x[-1]

    def fn(s):
        s = np.asarray(s, dtype=float)
        out = np.where((s >= lo) & (s <= hi), spline(np.clip(s, lo, hi)), 0.0)
        return out

    return _build(fn, domain_kind, name)


def read_csv_table(path):
    xs, us = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                xs.append(float(row[0]))
                us.append(float(row[1]))
            except ValueError:
                continue  # header row
    return np.array(xs), np.array(us)


def validate_moment(potential, bound=1e12):
    """Quadrature estimate of the weighted moment of ``|u|``.

    Partial integrals over dyadic windows [2^(n-1), 2^n] are tracked; three
    non-decreasing increments past the support (or a sum above ``bound``)
    signal divergence.
    """
    fn = potential.eval if isinstance(potential, Potential) else potential
    lo = potential.x_left if isinstance(potential, Potential) else 0.0
    support = potential.x_support if isinstance(potential, Potential) else 1.0
    total = _moment(fn, lo, 1.0) if lo < 1.0 else 0.0
    incs = []
    n = 1
    while 2.0 ** (n - 1) < max(8 * support, 256.0):
        inc = _moment(fn, 2.0 ** (n - 1), 2.0**n)
        total += inc
        incs.append(inc)
        if total > bound:
            raise DivergentMoment(f"moment exceeds {bound:g}")
        n += 1
    tail = incs[-4:]
    if tail[-1] > 0 and all(b >= a for a, b in zip(tail, tail[1:])):
        raise DivergentMoment("moment tail increments do not decay")
    return total


@dataclass
class SchrodingerData:
    q0: Callable
    bc_kind: str = "dirichlet"
    g0: Optional[Callable] = None
    g1: Optional[Callable] = None
    compat_tol: float = 1e-8

    def __post_init__(self):
        if self.bc_kind not in ("dirichlet", "neumann"):
            raise ValueError("bc_kind must be 'dirichlet' or 'neumann'")
        if self.bc_kind == "dirichlet":
            if self.g0 is None or self.g1 is not None:
                raise ValueError("Dirichlet data needs g0 and no g1")
        elif self.g1 is None or self.g0 is not None:
            raise ValueError("Neumann data needs g1 and no g0")
        self.compatibility_error = self._compat()
        if self.compatibility_error > self.compat_tol:
            warnings.warn(
                f"initial and boundary data incompatible at the corner "
                f"(mismatch {self.compatibility_error:.3e}); accuracy claims void",
                stacklevel=2,
            )

    @property
    def boundary(self):
        return self.g0 if self.bc_kind == "dirichlet" else self.g1

    def _compat(self):
        z = np.array([0.0])
        if self.bc_kind == "dirichlet":
            return float(abs(self.q0(z)[0] - self.g0(z)[0]))
        h = 1e-4
        dq = (-3 * self.q0(z)[0] + 4 * self.q0(z + h)[0] - self.q0(z + 2 * h)[0]) / (2 * h)
        return float(abs(dq - self.g1(z)[0]))


@dataclass
class LaplaceData:
    f: Callable
    g: Callable
    beta: float = 0.0
    gamma1: float = -1.0
    gamma2: float = 0.0
    tol: float = TRUNCATION_TOL

    def __post_init__(self):
        self.f_support = effective_support(self.f, self.tol)
        self.g_support = effective_support(self.g, self.tol)
