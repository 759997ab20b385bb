"""Quarter-plane problem  q_xx + q_yy + u(x) q = 0  with Poincare boundary conditions

    q_y(x, 0) + gamma1 q(x, 0) = f(x),
    q_x(0, y) + beta q_y(0, y) + gamma2 q(0, y) = g(y).

For beta = 0 and gamma1 < 0 the field follows from known transforms alone;
for beta != 0 the boundary transform g0 is tied to the data by a scalar
jump relation, which is certified here (not solved).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundStatePresent, PoleOnContour, PsiZeroAtOrigin
from .fields import FieldSample, laplace_residual
from .jost import JostSolver
from .potentials import LaplaceData
from .quadrature import Contour, Segment
from .schrodinger import ZERO_CUTOFF, complex_node_data, half_line_fourier, real_node_data
from .transforms import filon_linear

K_DEFAULT = 40.0
PANEL_MAX = 0.25
POLE_GUARD = 1e-6


@dataclass
class SpectralValues:
    """Known spectral functions at a set of wavenumbers (and psi on an x grid)."""

    k: np.ndarray
    psi: np.ndarray
    psi0: np.ndarray
    dpsi0: np.ndarray
    a: np.ndarray
    H: np.ndarray
    F: np.ndarray
    N: np.ndarray
    D: np.ndarray
    J: np.ndarray
    d: np.ndarray
    h: np.ndarray


class LaplaceSpectralFns:
    """Evaluators of the known parts H, F, N, J, D, d, h for one problem."""

    def __init__(self, potential, data: LaplaceData, jost=None):
        self.potential = potential
        self.data = data
        self.jost = jost or JostSolver(potential)
        bs = self.jost.find_bound_states("half_line")
        if bs.p:
            raise BoundStatePresent(
                f"a(k) vanishes at k = i*{bs.p[0]:.6g}; the representation assumes no zeros")
        self.f = lambda x: np.asarray(data.f(np.asarray(x, dtype=float)), dtype=complex)
        self.g = lambda y: np.asarray(data.g(np.asarray(y, dtype=float)), dtype=complex)

    def _nodes(self, k, x):
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        if np.any(k.imag < -1e-14):
            raise ValueError("spectral functions are evaluated for Im k >= 0")
        real = np.abs(k.imag) < 1e-14
        out = {}
        x = np.atleast_1d(np.asarray(x, dtype=float))
        psi = np.empty((len(k), len(x)), dtype=complex)
        psi0 = np.empty(len(k), dtype=complex)
        dpsi0 = np.empty_like(psi0)
        fpsi = np.empty_like(psi0)
        fphi = np.empty_like(psi0)
        if real.any():
            kr = k[real].real
            nd = real_node_data(self.jost, self.f, np.abs(kr), x)
            neg = nd.mirrored()
            pick = lambda p, n: np.where((kr > 0)[:, None] if np.ndim(p) > 1 else kr > 0, p, n)
            psi[real] = pick(nd.psi, neg.psi)
            psi0[real] = pick(nd.psi0, neg.psi0)
            dpsi0[real] = pick(nd.dpsi0, neg.dpsi0)
            fpsi[real] = pick(nd.tilde_q0, neg.tilde_q0)
            fphi[real] = pick(nd.hat_q0, neg.hat_q0)
        if (~real).any():
            nd = complex_node_data(self.jost, self.f, k[~real], x, need_hat=True)
            psi[~real], psi0[~real], dpsi0[~real] = nd.psi, nd.psi0, nd.dpsi0
            fpsi[~real], fphi[~real] = nd.tilde_q0, nd.hat_q0
        out.update(psi=psi, psi0=psi0, dpsi0=dpsi0, fpsi=fpsi, fphi=fphi)
        return k, out

    def g_transform(self, k):
        """Integral of exp(k y) g(y) over y > 0 (Re k <= 0, or g compactly supported)."""
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        return half_line_fourier(self.g, 1j * k, support=self.data.g_support)

    def evaluate(self, k, x=(0.0,)):
        b, g1, g2 = self.data.beta, self.data.gamma1, self.data.gamma2
        k, n = self._nodes(k, x)
        G = self.g_transform(k)
        phi0, dphi0 = np.ones_like(k), -1j * k
        a = (phi0 * n["dpsi0"] - dphi0 * n["psi0"]) / (2j * k)
        H = n["fpsi"] + n["psi0"] * G
        D = n["dpsi0"] + (g2 - b * k) * n["psi0"]
        J = (k + g1) / (k - g1) * (n["dpsi0"] + (g2 + b * k) * n["psi0"]) / D
        # H(-conj k) conjugated: on the imaginary axis -conj k = k
        mirror = -np.conj(k)
        if np.allclose(mirror, k):
            Hm = H
        else:
            km, nm = self._nodes(mirror, [0.0])
            Hm = nm["fpsi"] + nm["psi0"] * self.g_transform(km)
        F = ((k - g1) * H + (k + g1) * np.conj(Hm)) / ((k - g1) * D)
        N = -(n["psi0"] * n["fphi"] - phi0 * n["fpsi"]) / (1j * a * (k - g1) * n["psi0"])
        d = dphi0 + (g2 - b * k) * phi0
        h = n["fphi"] + phi0 * G
        return SpectralValues(k, n["psi"], n["psi0"], n["dpsi0"], a, H, F, N, D, J, d, h)


def laplace_spectral_fns(f, g, potential, beta=0.0, gamma1=-1.0, gamma2=0.0, jost=None):
    return LaplaceSpectralFns(potential, LaplaceData(f, g, beta, gamma1, gamma2), jost)


# -- quadrature nodes -----------------------------------------------------------

def _axis_nodes(K, extent, panel_max, graded=0):
    """GK15 nodes on (0, K]; ``graded`` geometric panels refine toward k = 0."""
    width = min(panel_max, 2 * np.pi / (extent + 1))
    segs, panels = [], []
    lo = 0.0
    if graded:
        edges = np.concatenate([[0.0], width * 0.5 ** np.arange(graded, -1, -1)])
        segs += [Segment.line(a, b) for a, b in zip(edges[:-1], edges[1:])]
        panels += [1] * (len(edges) - 1)
        lo = width
    segs.append(Segment.line(lo, K))
    panels.append(int(np.ceil((K - lo) / width)))
    s, w, wg = Contour(segs).gk15_nodes(panels)
    return s.real, w.real, wg.real


def _check_algebraic(data):
    if data.beta != 0.0:
        raise ValueError("the algebraic representation needs beta = 0")
    if data.gamma1 >= 0:
        raise PoleOnContour("gamma1 >= 0 puts a pole of the representation inside the quadrant")


@dataclass
class AlgebraicTerms:
    """Node data for the four integrals of the algebraic representation."""

    kr: np.ndarray
    wr: np.ndarray
    wr_g: np.ndarray
    real: SpectralValues
    kappa: np.ndarray
    wi: np.ndarray
    wi_g: np.ndarray
    imag: SpectralValues
    K: float


def _algebraic_terms(sf, x, extent, K, panel_max):
    kr, wr, wgr = _axis_nodes(K, float(np.max(x, initial=0.0)), panel_max)
    kap, wi, wgi = _axis_nodes(K, extent, panel_max)
    real = sf.evaluate(kr, x)
    imag = sf.evaluate(1j * kap, x)
    if np.any(np.abs(imag.psi0) < ZERO_CUTOFF):
        raise PsiZeroAtOrigin("psi(0, k) vanishes on the imaginary axis")
    g1 = sf.data.gamma1
    if np.min(np.abs(1j * kap + g1)) < POLE_GUARD:
        raise PoleOnContour("k = -gamma1 is too close to the contour")
    return AlgebraicTerms(kr, wr, wgr, real, kap, wi, wgi, imag, K)


def _algebraic_field(terms, y, g1, which="kronrod"):
    wr = terms.wr if which == "kronrod" else terms.wr_g
    wi = terms.wi if which == "kronrod" else terms.wi_g
    r, m = terms.real, terms.imag
    kr, k = terms.kr, 1j * terms.kappa
    er = np.exp(-np.outer(kr, y))
    # int_inf^0 e^{-ky} psi N dk  and  int_{-inf}^0 e^{ky} psi(x,k) conj N(-conj k) dk
    T1 = -np.einsum("k,kx,ky->xy", wr * r.N, r.psi, er)
    T3 = np.einsum("k,kx,ky->xy", wr * np.conj(r.N), np.conj(r.psi), er)
    kern = m.psi / m.psi0[:, None]
    ratio = (k - g1) / (k + g1)
    # dk = i d(kappa) on the imaginary axis
    T2 = np.einsum("k,kx,ky->xy", 1j * wi * m.F, kern, np.exp(-np.outer(k, y)))
    T4 = np.einsum("k,kx,ky->xy", 1j * wi * ratio * m.F, kern, np.exp(np.outer(k, y)))
    return (T1 + T2 + T3 + T4) / (2j * np.pi)


def solve_algebraic(potential, data: LaplaceData, x_grid, y_grid, cutoff=K_DEFAULT,
                    panel_max=PANEL_MAX, jost=None, spectral_fns=None):
    """Field for beta = 0, gamma1 < 0 from transforms of f and g only."""
    _check_algebraic(data)
    sf = spectral_fns or LaplaceSpectralFns(potential, data, jost)
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    terms = _algebraic_terms(sf, x, float(np.max(y, initial=0.0)), float(cutoff), panel_max)
    q = _algebraic_field(terms, y, data.gamma1)
    q_g = _algebraic_field(terms, y, data.gamma1, "gauss")
    diag = _laplace_diagnostics(potential, data, x, y, q)
    diag.update({"cutoff": float(cutoff), "quadrature_error": float(np.max(np.abs(q - q_g))),
                 "representation": "algebraic"})
    return FieldSample(x, y, q.real, diag, axes=("x", "y"))


def _laplace_diagnostics(potential, data, x, y, q):
    d = {"max_imag": float(np.max(np.abs(q.imag), initial=0.0))}
    res = laplace_residual(q.real, x, y, potential.eval)
    d["pde_residual"] = None if np.isnan(res) else res
    d["bc_bottom_error"] = d["bc_left_error"] = None
    if len(y) >= 3 and y[0] == 0.0:
        hy = y[1] - y[0]
        qy = (-3 * q[:, 0] + 4 * q[:, 1] - q[:, 2]).real / (2 * hy)
        fx = np.asarray(data.f(x), dtype=float)
        d["bc_bottom_error"] = float(np.max(np.abs(qy + data.gamma1 * q[:, 0].real - fx)))
        d["f_norm"] = float(np.max(np.abs(fx)))
    if len(x) >= 3 and x[0] == 0.0:
        hx = x[1] - x[0]
        qx = (-3 * q[0] + 4 * q[1] - q[2]).real / (2 * hx)
        gy = np.asarray(data.g(y), dtype=float)
        qyl = np.gradient(q[0].real, y) if len(y) >= 2 else 0.0
        d["bc_left_error"] = float(np.max(np.abs(qx + data.beta * qyl + data.gamma2 * q[0].real
                                                 - gy)))
        d["g_norm"] = float(np.max(np.abs(gy)))
    return d


# -- boundary transforms ---------------------------------------------------------

def exponential_transform(y, values, k):
    """g0(k) = integral of exp(k y) q(0, y) dy from samples (linear Filon)."""
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    return filon_linear(y, values, -1j * k)


def algebraic_boundary_transform(potential, data, kappa, cutoff=K_DEFAULT, panel_max=PANEL_MAX,
                                 jost=None, spectral_fns=None):
    """g0(i kappa) for the algebraic field, as the limit from Re k < 0.

    Integrating the representation at x = 0 against exp(k y) turns every
    exponential into a Cauchy kernel; the one that becomes singular on the
    imaginary axis is split into a principal value and a half residue.
    """
    _check_algebraic(data)
    sf = spectral_fns or LaplaceSpectralFns(potential, data, jost)
    K = float(cutoff)
    kap_t = np.atleast_1d(np.asarray(kappa, dtype=float))
    g1 = data.gamma1
    kr, wr, _ = _axis_nodes(K, 0.0, panel_max)
    lam, wl, _ = _axis_nodes(K, 0.0, panel_max)
    r = sf.evaluate(kr, [0.0])
    m = sf.evaluate(1j * lam, [0.0])
    Ft = sf.evaluate(1j * kap_t, [0.0]).F
    A = r.psi0 * r.N
    out = np.empty(len(kap_t), dtype=complex)
    for i, (kt, F0) in enumerate(zip(1j * kap_t, Ft)):
        # int_0^inf e^{ky} e^{-ly} dy = 1/(l-k),  int_0^inf e^{ky} e^{ly} dy = -1/(l+k)
        t1 = -np.sum(wr * A / (kr - kt))
        t3 = np.sum(wr * np.conj(A) / (kr - kt))
        # i int F(i lam) / (i lam - k) d lam -> PV int F/(lam - kappa) + i pi F(i kappa)
        kv = kap_t[i]
        pv = np.sum(wl * (m.F - F0) / (lam - kv)) + F0 * np.log((K - kv) / kv)
        t2 = pv + 1j * np.pi * F0
        ratio = (1j * lam - g1) / (1j * lam + g1)
        t4 = -np.sum(1j * wl * ratio * m.F / (1j * lam + kt))
        out[i] = (t1 + t2 + t3 + t4) / (2j * np.pi)
    return out


def algebraic_candidate(potential, data, kappa, **kw):
    """Callable g0(k) on +-i kappa built from :func:`algebraic_boundary_transform`.

    q is real, so g0(-i kappa) is the conjugate of g0(i kappa).
    """
    kappa = np.atleast_1d(np.asarray(kappa, dtype=float))
    values = algebraic_boundary_transform(potential, data, kappa, **kw)

    def candidate(k):
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        idx = np.array([int(np.argmin(np.abs(kappa - abs(kk.imag)))) for kk in k])
        if np.any(np.abs(kappa[idx] - np.abs(k.imag)) > 1e-12 * (1 + kappa[idx])):
            raise ValueError("candidate requested off its sampled points")
        return np.where(k.imag > 0, values[idx], np.conj(values[idx]))

    return candidate


# -- certification ------------------------------------------------------------------

def rh_jump_residual(candidate_g0k, spectral_fns, q00, k_grid):
    """max |g0(k) + J g0(-k) - 2 k beta psi(0,k) q(0,0) / ((k - gamma1) D) - F| on i R+.

    ``candidate_g0k(k)`` must accept k on both halves of the imaginary axis.
    The relation on the negative half, rewritten with s = -k, is the same
    expression, so one evaluation certifies both.
    """
    k = np.atleast_1d(np.asarray(k_grid, dtype=complex))
    if np.any(np.abs(k.real) > 1e-14) or np.any(k.imag <= 0):
        raise ValueError("k_grid must lie on the positive imaginary axis")
    sv = spectral_fns.evaluate(k)
    b, g1 = spectral_fns.data.beta, spectral_fns.data.gamma1
    gk = np.asarray(candidate_g0k(k), dtype=complex)
    gm = np.asarray(candidate_g0k(-k), dtype=complex)
    forcing = 2 * k * b * sv.psi0 / ((k - g1) * sv.D) * q00
    return float(np.max(np.abs(gk + sv.J * gm - forcing - sv.F)))


def discarded_terms(potential, data, y_trace, q_left, x_grid, y_grid, cutoff=K_DEFAULT,
                    panel_max=PANEL_MAX, jost=None, spectral_fns=None):
    """The two quadrant-boundary integrals dropped by the algebraic representation.

    g0 is built from a sampled trace q(0, y).  Both vanish for an exact trace;
    evaluation points should keep away from x = 0 and y = 0 where the truncated
    contours converge only algebraically.
    """
    _check_algebraic(data)
    sf = spectral_fns or LaplaceSpectralFns(potential, data, jost)
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    K = float(cutoff)
    g1 = data.gamma1
    # sampled traces decay slowly in y, so g0 can be log-singular at k = 0
    kr, wr, _ = _axis_nodes(K, float(np.max(x, initial=0.0)), panel_max, graded=30)
    kap, wi, _ = _axis_nodes(K, float(np.max(y, initial=0.0)), panel_max, graded=30)
    r = sf.evaluate(kr, x)
    m = sf.evaluate(1j * kap, x)
    ki = 1j * kap
    g0 = lambda k: exponential_transform(y_trace, q_left, k)
    er = np.exp(-np.outer(kr, y))
    kern_r = r.psi / r.psi0[:, None]
    kern_i = m.psi / m.psi0[:, None]
    # D1 boundary: from +inf to 0 along R, then 0 to i inf
    w1r = -wr * g0(-kr) * (kr + g1) / (kr - g1)
    w1i = 1j * wi * g0(-ki) * (ki + g1) / (ki - g1)
    I1 = (np.einsum("k,kx,ky->xy", w1r, kern_r, er)
          + np.einsum("k,kx,ky->xy", w1i, kern_i, np.exp(-np.outer(ki, y))))
    # D2 boundary: from -inf to 0 along R (psi(x,-s) = conj psi(x,s)), then 0 to i inf
    w2r = wr * g0(-kr) * (-kr - g1) / (-kr + g1)
    w2i = 1j * wi * g0(ki) * (ki - g1) / (ki + g1)
    I2 = (np.einsum("k,kx,ky->xy", w2r, np.conj(kern_r), er)
          + np.einsum("k,kx,ky->xy", w2i, kern_i, np.exp(np.outer(ki, y))))
    return -(I1 + I2) / (2j * np.pi)


def global_relation_residual_laplace(traces, jost, k_phi, k_psi):
    """Residuals of the phi relation (k < 0 real) and psi relation (second quadrant).

    ``traces`` supplies x, y grids and q_bottom, qy_bottom, q_left, qx_left.
    """
    x, y = traces.x, traces.y
    v = np.asarray(traces.q_bottom, dtype=complex)
    vy = np.asarray(traces.qy_bottom, dtype=complex)
    ql = np.asarray(traces.q_left, dtype=complex)
    qxl = np.asarray(traces.qx_left, dtype=complex)
    out = []
    for kind, kk in (("phi", k_phi), ("psi", k_psi)):
        k = np.atleast_1d(np.asarray(kk, dtype=complex))
        if len(k) == 0:
            out.append(0.0)
            continue
        if kind == "phi" and (np.any(np.abs(k.imag) > 1e-14) or np.any(k.real >= 0)):
            raise ValueError("the phi relation is evaluated on the negative real axis")
        if kind == "psi" and (np.any(k.imag < 0) or np.any(k.real > 0)):
            raise ValueError("the psi relation is evaluated in the second quadrant")
        s = jost.sweep(k, "psi", x)
        mk = s.m
        psi0, dpsi0 = s.value()[:, 0], s.deriv()[:, 0]
        res = []
        for i, kv in enumerate(k):
            w = kv * v - vy
            if kind == "psi":
                xint = filon_linear(x, w * mk[i], kv)[0]
                c0, c1 = psi0[i], dpsi0[i]
            else:
                # phi = a psi(-k) + b psi(k) with psi(x,-k) = conj psi(x,k)
                a = (dpsi0[i] + 1j * kv * psi0[i]) / (2j * kv)
                b = (np.conj(psi0[i]) * (-1j * kv) - np.conj(dpsi0[i])) / (2j * kv)
                xint = (a * filon_linear(x, w * np.conj(mk[i]), -kv)[0]
                        + b * filon_linear(x, w * mk[i], kv)[0])
                c0, c1 = 1.0, -1j * kv
            yint = exponential_transform(y, ql * c1 - qxl * c0, kv)[0]
            res.append(abs(xint + yint))
        out.append(float(max(res)))
    return tuple(out)


# -- mu functions ---------------------------------------------------------------

def _cumtrapz(v, z, axis):
    from scipy.integrate import cumulative_trapezoid
    return cumulative_trapezoid(v, z, axis=axis, initial=0)


def mu_functions_check(jost, field_sample, k_samples, decay_ks=(5.0, 10.0, 20.0, 40.0)):
    """Build I1, I2, mu1, mu2 from a sampled field and test their defining properties.

    Returns the relative residual of mu_xx + (u + k^2) mu = q on interior
    points, the jump identity across arg k = pi/2, and |k^2 mu| samples along
    arg k = pi/4 (bounded when k mu = O(1/k)).
    """
    x = field_sample.x_grid
    y = field_sample.t_grid
    q = np.asarray(field_sample.values, dtype=complex)
    u = jost.potential.eval
    qscale = float(np.max(np.abs(q))) or 1.0

    def parts(k):
        ps = jost.sweep([k], "psi", x)
        ph = jost.sweep([k], "phi", x)
        psi, phi = ps.value()[0], ph.value()[0]
        psi0, dpsi0 = psi[0], ps.deriv()[0, 0]
        a = (dpsi0 + 1j * k * psi0) / (2j * k)
        qpsi = q * psi[:, None]
        qphi = q * phi[:, None]
        tail = _cumtrapz(qpsi[::-1], -x[::-1], 0)[::-1]   # int_x^inf
        head = _cumtrapz(qphi, x, 0)                       # int_0^x
        total = tail[0]
        I1 = (phi[:, None] * tail + psi[:, None] * (head - total[None, :] / psi0)) / (1j * a)
        return psi, psi0, I1

    def I2(k):
        q0y = q[0]
        Ey = np.exp(-k * y)
        lo = _cumtrapz(np.exp(k * y) * q0y, y, 0) * Ey
        hi_full = _cumtrapz(np.exp(-k * y) * q0y, y, 0)
        hi = (hi_full[-1] - hi_full) * np.exp(k * y)
        return lo + hi

    def mu(k, branch):
        psi, psi0, I1 = parts(k)
        if branch == 1:
            return (I1 + psi[:, None] / psi0 * I2(k)[None, :]) / (2 * k)
        return (I1 - psi[:, None] / psi0 * I2(-k)[None, :]) / (2 * k)

    report = {"pde_residual": [], "jump_residual": [], "decay": []}
    dx = x[1] - x[0]
    for k in np.atleast_1d(np.asarray(k_samples, dtype=complex)):
        branch = 1 if k.real >= 0 else 2
        M = mu(k, branch)
        mxx = (M[2:] - 2 * M[1:-1] + M[:-2]) / dx**2
        r = mxx + (u(x[1:-1])[:, None] + k * k) * M[1:-1] - q[1:-1]
        report["pde_residual"].append(float(np.max(np.abs(r[:, 1:-1])) / qscale))
    for s in (0.5, 1.0, 2.0):
        k = 1j * s
        psi, psi0, _ = parts(k)
        jump = 2 * k * mu(k, 1) - 2 * k * mu(k, 2)
        q0y = q[0]
        g0p = np.trapezoid(np.exp(k * y) * q0y, y)
        g0m = np.trapezoid(np.exp(-k * y) * q0y, y)
        target = psi[:, None] / psi0 * (np.exp(-k * y) * g0p + np.exp(k * y) * g0m)[None, :]
        report["jump_residual"].append(float(np.max(np.abs(jump - target)) / qscale))
    for R in decay_ks:
        k = R * np.exp(0.25j * np.pi)
        M = mu(k, 1)
        report["decay"].append(float(np.max(np.abs(k * k * M[1:-1, 1:-1]))))
    return report
