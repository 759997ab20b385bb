"""Jost solutions, scattering functions and bound states.

Every solve integrates a factored variable so that nothing overflows for
Im k > 0:

* psi: m = psi * exp(-ikx),   m'' + 2ik m' + u m = 0, m = 1 at +infinity
* phi: n = phi * exp(+ikx),   n'' - 2ik n' + u n = 0, n(0) = 1, n'(0) = 0
* Phi: n = Phi * exp(+ikx),   same ODE, n = 1 at -infinity

All wavenumbers of a sweep are integrated together, so errors are
correlated across k (useful for difference quotients in k).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NearZeroWavenumber
from .potentials import effective_support
from .quadrature import bracket_roots, integrate_ode

K_CUTOFF = 1e-3
ODE_TOL = 1e-11
SWEEP_CHUNK = 1024


def _free_extend(m, dm, k, d, kind):
    """Continue a factored solution across a region where u = 0.

    ``d`` is the signed distance from the last integrated point.
    """
    sgn = 1.0 if kind == "psi" else -1.0
    two_ik = -2j * k * sgn  # psi factor solutions are 1 and exp(-2ikx)
    E = np.exp(two_ik * d)
    # m(x) = m0 + dm0 * (E - 1) / two_ik , m'(x) = dm0 * E
    safe = np.where(two_ik == 0, 1.0, two_ik)
    ratio = np.where(two_ik == 0, d, np.expm1(two_ik * d) / safe)
    return m + dm * ratio, dm * E


@dataclass
class JostSweep:
    """Factored Jost values on a (k, x) grid plus data integrals."""

    kind: str
    k: np.ndarray
    x: np.ndarray
    m: np.ndarray
    dm: np.ndarray
    integrals: np.ndarray = field(default=None)

    @property
    def phase(self):
        s = 1.0 if self.kind == "psi" else -1.0
        return np.exp(s * 1j * self.k[:, None] * self.x[None, :])

    def value(self):
        return self.m * self.phase

    def deriv(self):
        s = 1.0 if self.kind == "psi" else -1.0
        return (self.dm + s * 1j * self.k[:, None] * self.m) * self.phase


class JostSolver:
    """Jost machinery for one immutable potential."""

    def __init__(self, potential, tol=ODE_TOL):
        self.potential = potential
        self.tol = tol

    # -- core integration -------------------------------------------------
    def _rhs(self, k, kind, weights):
        u = self.potential.eval
        nk = len(k)
        nd = len(weights)
        sgn = 1.0 if kind == "psi" else -1.0
        c = -2j * k if kind == "psi" else 2j * k

        def rhs(x, y):
            m = y[:nk]
            dm = y[nk:2 * nk]
            ux = float(u(np.array([x]))[0])
            out = np.empty_like(y)
            out[:nk] = dm
            out[nk:2 * nk] = c * dm - ux * m
            if nd:
                ph = m * np.exp(sgn * 1j * k * x)
                for j, w in enumerate(weights):
                    out[(2 + j) * nk:(3 + j) * nk] = ph * w(x)
            return out

        return rhs

    def _march(self, k, kind, x0, x1, m0, dm0, x_eval, weights):
        nk = len(k)
        y0 = np.concatenate([m0, dm0, np.zeros(nk * len(weights), dtype=complex)])
        inside = x_eval[(x_eval >= min(x0, x1)) & (x_eval <= max(x0, x1))]
        order = np.unique(inside)
        order = order[order != x1]
        if x1 < x0:
            order = order[::-1]
        npts = np.concatenate([order, [x1]])
        ys = integrate_ode(self._rhs(k, kind, weights), x0, x1, y0.astype(complex),
                           tol=self.tol, x_eval=npts, atol=self.tol * 1e-3)
        ys = np.asarray(ys)
        end = ys[:, -1]
        vals = {float(x): ys[:, i] for i, x in enumerate(order)}
        if np.any(x_eval == x1):
            vals[float(x1)] = end
        return end, vals

    def sweep(self, k, kind="psi", x=None, data=(), chunk=SWEEP_CHUNK):
        """Solve for all ``k`` at once.

        ``data`` are callables w(x) (zero for x < 0 implied); the returned
        ``integrals[:, j]`` approximate the half-line integral of w_j times the
        Jost solution.  Large k sets are split into batches of similar |k| so
        low wavenumbers are not stepped at the pace of high ones.
        """
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        x = np.atleast_1d(np.asarray(x if x is not None else [0.0], dtype=float))
        if len(k) > chunk:
            order = np.argsort(np.abs(k), kind="stable")
            parts = [self._sweep(k[order[i:i + chunk]], kind, x, data)
                     for i in range(0, len(k), chunk)]
            inv = np.argsort(order, kind="stable")
            cat = lambda name: np.concatenate([getattr(p, name) for p in parts])[inv]
            return JostSweep(kind, k, x, cat("m"), cat("dm"), cat("integrals"))
        return self._sweep(k, kind, x, data)

    def _sweep(self, k, kind, x, data):
        pot = self.potential
        data = list(data)
        nk = len(k)
        one = np.ones(nk, dtype=complex)
        zero = np.zeros(nk, dtype=complex)
        X = pot.x_support
        X_data = max([effective_support(w) for w in data], default=0.0)
        X_int = max(X, X_data)
        m = np.zeros((nk, len(x)), dtype=complex)
        dm = np.zeros_like(m)
        integrals = np.zeros((nk, len(data)), dtype=complex)
        records = {}
        if kind == "psi":
            end, vals = self._march(k, kind, X_int, 0.0, one, zero, x, data)
            records.update(vals)
            integrals[:] = -end[2 * nk:].reshape(len(data), nk).T if data else 0
            m_lo, dm_lo, x_lo = end[:nk], end[nk:2 * nk], 0.0
            if (x < 0).any():
                xl = min(pot.x_left, 0.0) if pot.domain_kind == "full_line" else 0.0
                if xl < 0:
                    end2, vals2 = self._march(k, kind, 0.0, xl, m_lo, dm_lo, x, [])
                    records.update(vals2)
                    m_lo, dm_lo, x_lo = end2[:nk], end2[nk:2 * nk], xl
            for i, xv in enumerate(x):
                if xv in records:
                    r = records[xv]
                    m[:, i], dm[:, i] = r[:nk], r[nk:2 * nk]
                elif xv > X_int:
                    m[:, i], dm[:, i] = 1.0, 0.0
                else:
                    m[:, i], dm[:, i] = _free_extend(m_lo, dm_lo, k, xv - x_lo, kind)
        else:
            n0, dn0 = one, zero
            if kind == "phi":
                if (x < 0).any():
                    raise ValueError("phi is only defined for x >= 0")
            elif kind == "Phi":
                if pot.domain_kind != "full_line":
                    raise ValueError("Phi needs a full-line potential")
                end0, vals0 = self._march(k, kind, pot.x_left, 0.0, one, zero, x, [])
                records.update(vals0)
                n0, dn0 = end0[:nk], end0[nk:2 * nk]
            else:
                raise ValueError(f"unknown Jost kind {kind!r}")
            # outward solutions are only needed up to the data and the sampled x
            X_int = max(X_data, min(float(x.max()), X))
            end, vals = self._march(k, kind, 0.0, X_int, n0, dn0, x, data)
            records.update(vals)
            if data:
                integrals[:] = end[2 * nk:].reshape(len(data), nk).T
            n_hi, dn_hi = end[:nk], end[nk:2 * nk]
            for i, xv in enumerate(x):
                if xv in records:
                    r = records[xv]
                    m[:, i], dm[:, i] = r[:nk], r[nk:2 * nk]
                elif xv > X_int:
                    m[:, i], dm[:, i] = _free_extend(n_hi, dn_hi, k, xv - X_int, kind)
                else:
                    m[:, i], dm[:, i] = 1.0, 0.0  # left of the support (Phi)
        return JostSweep(kind, k, x, m, dm, integrals)

    # -- point evaluators -------------------------------------------------
    def psi(self, x, k):
        s = self.sweep(k, "psi", x)
        return s.value(), s.deriv()

    def phi(self, x, k):
        s = self.sweep(k, "phi", x)
        return s.value(), s.deriv()

    def Phi(self, x, k):
        if self.potential.domain_kind != "full_line":
            raise ValueError("Phi needs a full-line potential")
        s = self.sweep(k, "Phi", x)
        return s.value(), s.deriv()

    def boundary_values(self, k, variant="half_line"):
        """psi(0,k), psi_x(0,k) and the matching phi-type values at x = 0."""
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        s = self.sweep(k, "psi", [0.0])
        psi0, dpsi0 = s.value()[:, 0], s.deriv()[:, 0]
        if variant == "half_line":
            return psi0, dpsi0, np.ones_like(k), -1j * k
        t = self.sweep(k, "Phi", [0.0])
        return psi0, dpsi0, t.value()[:, 0], t.deriv()[:, 0]

    # -- scattering functions ----------------------------------------------
    def a(self, k, check=True):
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        if check:
            _check_k(k)
        psi0, dpsi0, _, _ = self.boundary_values(k)
        return (dpsi0 + 1j * k * psi0) / (2j * k)

    def a_wronskian(self, k, x):
        """a(k) from the Wronskian of phi and psi evaluated at position ``x``."""
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        _check_k(k)
        p, dp = self.psi(x, k)
        f, df = self.phi(x, k)
        return (f * dp - p * df) / (2j * k[:, None])

    def b(self, k, x=0.0):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        _check_k(k)
        kk = np.concatenate([k, -k]).astype(complex)
        p, dp = self.psi([x], kk)
        f, df = self.phi([x], k.astype(complex))
        n = len(k)
        pm, dpm = p[n:, 0], dp[n:, 0]
        return (pm * df[:, 0] - f[:, 0] * dpm) / (2j * k)

    def A(self, k, check=True):
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        if check:
            _check_k(k)
        psi0, dpsi0, P0, dP0 = self.boundary_values(k, "full_line")
        return (P0 * dpsi0 - dP0 * psi0) / (2j * k)

    def B(self, k, x=0.0):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        _check_k(k)
        kk = np.concatenate([k, -k]).astype(complex)
        p, dp = self.psi([x], kk)
        f, df = self.Phi([x], k.astype(complex))
        n = len(k)
        return (p[n:, 0] * df[:, 0] - f[:, 0] * dp[n:, 0]) / (2j * k)

    def scattering_fn(self, variant):
        return self.a if variant == "half_line" else self.A

    # -- bound states -----------------------------------------------------
    def _imag_axis_real(self, fn):
        def g(p):
            p = np.atleast_1d(np.asarray(p, dtype=float))
            return np.real(fn(1j * p))
        return g

    def p_bracket(self):
        return 1e-4, float(np.sqrt(max(0.0, self.potential.max_value))) + 1.0

    def find_bound_states(self, variant="half_line", n_scan=400):
        """Zeros i p_j of a (or A) on the positive imaginary axis and a-dot there."""
        if self.potential.is_zero:
            return BoundStates([], [])
        afn = self.scattering_fn(variant)
        # p a(ip) is real and finite as p -> 0, giving cleaner sign changes
        g = lambda p: np.real(np.atleast_1d(p) * afn(1j * np.atleast_1d(p), check=False))
        ps = bracket_roots(g, self.p_bracket(), n_scan=n_scan)
        adots = [self.derivative_on_axis(lambda kk: afn(kk, check=False), p) for p in ps]
        return BoundStates(list(ps), adots)

    def derivative_on_axis(self, fn, p, rel_step=1e-5):
        """d fn / dk at k = i p by a five-point difference along the axis."""
        h = rel_step * p
        pts = 1j * (p + h * np.array([-2.0, -1.0, 1.0, 2.0]))
        v = fn(pts)
        d_dp = (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)
        return complex(d_dp / 1j)

    def psi0_zeros(self, n_scan=400):
        """Zeros i s of psi(0, .) on the positive imaginary axis (Dirichlet eigenvalues)."""
        if self.potential.is_zero:
            return []
        g = lambda p: np.real(self.sweep(1j * np.atleast_1d(p), "psi", [0.0]).value()[:, 0])
        return bracket_roots(g, self.p_bracket(), n_scan=n_scan)

    def psix0_zeros(self, n_scan=400):
        """Zeros i s of psi_x(0, .) on the positive imaginary axis (Neumann eigenvalues)."""
        if self.potential.is_zero:
            return []
        g = lambda p: np.real(self.sweep(1j * np.atleast_1d(p), "psi", [0.0]).deriv()[:, 0])
        return bracket_roots(g, self.p_bracket(), n_scan=n_scan)

    def scattering_data(self, variant="half_line"):
        bs = self.find_bound_states(variant)
        z = self.psi0_zeros()
        if z:
            warnings.warn(f"psi(0,k) vanishes at k = i*{z}; Dirichlet formulas pick up extra residues",
                          stacklevel=2)
        return ScatteringData(self, variant, bs.p, bs.a_dot, z)


@dataclass
class BoundStates:
    p: list
    a_dot: list

    def __iter__(self):
        return iter((self.p, self.a_dot))


@dataclass
class ScatteringData:
    """Scattering functions and discrete spectrum for one variant."""

    solver: JostSolver
    variant: str
    bound_states: list
    a_dot: list
    psi0_zeros: list

    def a(self, k):
        return self.solver.scattering_fn(self.variant)(k)

    def b(self, k):
        return self.solver.b(k) if self.variant == "half_line" else self.solver.B(k)

    @property
    def k_j(self):
        return [1j * p for p in self.bound_states]


def _check_k(k):
    if np.any(np.abs(k) < K_CUTOFF):
        raise NearZeroWavenumber(f"|k| < {K_CUTOFF:g}")


# thin functional surface ----------------------------------------------------

def jost_psi(potential, x, k):
    return JostSolver(potential).psi(x, k)


def jost_phi(potential, x, k):
    return JostSolver(potential).phi(x, k)


def jost_Phi(potential, x, k):
    return JostSolver(potential).Phi(x, k)


def scattering_a(potential, k):
    return JostSolver(potential).a(k)


def scattering_b(potential, k):
    return JostSolver(potential).b(k)


def find_bound_states(potential, variant="half_line"):
    return tuple(JostSolver(potential).find_bound_states(variant))
