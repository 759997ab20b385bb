"""Half-line Schrodinger problem  i q_t + q_xx + u(x) q = 0  (Dirichlet or Neumann).

The field is assembled from the scattering data of u and from transforms of
the initial and boundary data.  Four representations are offered:

* ``direct``    real-axis integral of psi/a times the spectral density
* ``deformed``  part of the integrand rotated onto the boundary of the first
                quadrant (poles on the imaginary axis passed on the right)
* ``longtime``  deformed form with the finite-horizon time transform replaced
                by its infinite-horizon limit
* ``sine``      Dirichlet only; the density is built from the kernel
                phi - psi/psi(0, k), needing no elimination step

Real-axis integrals exploit psi(x, -k) = conj psi(x, k).  The phi transforms
on the real axis come from the scattering relation phi = a psi(-k) + b psi(k),
so one inward sweep per node supplies everything.  Slowly decaying,
non-oscillatory 1/k parts of the integrands are integrated beyond the cutoff
in closed form (sine/cosine/exponential integrals).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import exp1, expn, sici

from .errors import PoleOnContour, PsiXZeroAtOrigin, PsiZeroAtOrigin
from .fields import FieldSample, one_sided_derivative, schrodinger_residual
from .jost import JostSolver
from .potentials import SchrodingerData, effective_support
from .quadrature import (KRONROD_NODES, KRONROD_WEIGHTS, Contour,
                         Segment, imaginary_ray_with_indents)
from .transforms import (DEFAULT_STEP, as_callable, real_parts, time_transform_grid,
                         time_transform_inf_grid)

K_MIN = 8.0
K_MAX = 30.0
PANEL_MAX = 0.25
ZERO_CUTOFF = 1e-10
POLE_GUARD = 1e-6
ARC_PANELS = 6
REPRESENTATIONS = ("direct", "deformed", "longtime", "sine")


# -- cutoff selection ----------------------------------------------------------

def _gl_nodes(a, b, width):
    n = max(1, int(np.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * KRONROD_NODES).ravel()
    w = (half[:, None] * KRONROD_WEIGHTS).ravel()
    return x, w


def half_line_fourier(fn, k, support=None, width=0.05):
    """Integral of exp(-ikx) fn(x) over x > 0 by fixed-panel Kronrod quadrature."""
    X = support if support is not None else effective_support(lambda s: np.abs(fn(s)))
    x, w = _gl_nodes(0.0, X, width)
    vals = np.asarray(fn(x), dtype=complex) * w
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    return np.exp(-1j * np.outer(k, x)) @ vals


def endpoint_values(q0, h=1e-4):
    """q0(0) and a second-order one-sided q0'(0)."""
    v = np.asarray(q0(np.array([0.0, h, 2 * h])), dtype=complex)
    return complex(v[0]), complex((-3 * v[0] + 4 * v[1] - v[2]) / (2 * h))


def cutoff_from_decay(q0, rel=1e-8, k_min=K_MIN, k_max=K_MAX):
    """Smallest K beyond which the smooth part of the transform of q0 is negligible.

    The endpoint terms q0(0)/(ik) + q0'(0)/(ik)^2 are removed first: their
    contributions are either cancelled by the boundary data or integrated in
    closed form.
    """
    ks = np.linspace(0.5, 4 * k_max, 1200)
    F = half_line_fourier(q0, ks)
    v0, d0 = endpoint_values(q0)
    smooth = np.abs(F - v0 / (1j * ks) - d0 / (1j * ks) ** 2)
    scale = float(np.max(np.abs(F))) or 1.0
    big = np.nonzero(smooth > rel * scale)[0]
    K = ks[big[-1]] * 1.1 if len(big) else k_min
    return float(np.clip(K, k_min, k_max))


# -- per-node spectral data --------------------------------------------------

@dataclass
class NodeData:
    """Jost values and data transforms at a set of wavenumbers."""

    k: np.ndarray
    psi: np.ndarray          # (Nk, Nx)
    psi0: np.ndarray
    dpsi0: np.ndarray
    phi0: np.ndarray         # phi-type value and derivative at x = 0
    dphi0: np.ndarray
    tq: np.ndarray           # psi integrals of (Re q0, Im q0)
    hq: np.ndarray = None    # phi-type integrals of (Re q0, Im q0)

    @property
    def a(self):
        return (self.phi0 * self.dpsi0 - self.dphi0 * self.psi0) / (2j * self.k)

    @property
    def tilde_q0(self):
        return self.tq[:, 0] + 1j * self.tq[:, 1]

    @property
    def hat_q0(self):
        return self.hq[:, 0] + 1j * self.hq[:, 1]

    def mirrored(self):
        """Data at -k for real k (real potential, componentwise conjugation)."""
        c = np.conj
        return NodeData(-self.k, c(self.psi), c(self.psi0), c(self.dpsi0), c(self.phi0),
                        c(self.dphi0), c(self.tq), None if self.hq is None else c(self.hq))


def _with_zero(x):
    xs = np.unique(np.concatenate([np.asarray(x, dtype=float), [0.0]]))
    return xs, int(np.searchsorted(xs, 0.0)), np.searchsorted(xs, x)


def real_node_data(jost, q0, k, x, variant="half_line"):
    """NodeData at real k > 0; phi transforms via phi = a psi(-k) + b psi(k)."""
    k = np.asarray(k, dtype=complex)
    xs, i0, ix = _with_zero(x)
    s = jost.sweep(k, "psi", xs, real_parts(q0))
    val, der = s.value(), s.deriv()
    psi0, dpsi0 = val[:, i0], der[:, i0]
    if variant == "half_line":
        phi0, dphi0 = np.ones_like(k), -1j * k
    else:
        t = jost.sweep(k, "Phi", [0.0])
        phi0, dphi0 = t.value()[:, 0], t.deriv()[:, 0]
    a = (phi0 * dpsi0 - dphi0 * psi0) / (2j * k)
    b = (np.conj(psi0) * dphi0 - phi0 * np.conj(dpsi0)) / (2j * k)
    tq = s.integrals
    hq = a[:, None] * np.conj(tq) + b[:, None] * tq
    return NodeData(k, val[:, ix], psi0, dpsi0, phi0, dphi0, tq, hq)


def complex_node_data(jost, q0, k, x, variant="half_line", need_hat=False):
    """NodeData at wavenumbers with Im k > 0 (direct sweeps)."""
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    xs, i0, ix = _with_zero(x)
    data = real_parts(q0)
    s = jost.sweep(k, "psi", xs, data)
    val, der = s.value(), s.deriv()
    kind = "phi" if variant == "half_line" else "Phi"
    hq = None
    if variant == "half_line":
        phi0, dphi0 = np.ones_like(k), -1j * k
    if need_hat or variant != "half_line":
        t = jost.sweep(k, kind, [0.0], data if need_hat else ())
        if variant != "half_line":
            phi0, dphi0 = t.value()[:, 0], t.deriv()[:, 0]
        hq = t.integrals if need_hat else None
    return NodeData(k, val[:, ix], val[:, i0], der[:, i0], phi0, dphi0, s.integrals, hq)


# -- tails beyond the cutoff -----------------------------------------------------

def tail_line(c, x, K):
    """(1/2pi) * integral over |k| > K of exp(ikx) c / (ik)."""
    si, _ = sici(K * np.asarray(x))
    return np.outer(np.pi / 2 - si, c) / np.pi


def tail_rays(c, x, K):
    """Same integrand over the two far pieces of the first-quadrant boundary."""
    z = K * np.asarray(x, dtype=float)
    si, ci = sici(z)
    pos = z > 0
    log_part = np.zeros_like(z)
    log_part[pos] = -ci[pos] - exp1(z[pos])
    return np.outer(log_part + 1j * (np.pi / 2 - si), c) / (2j * np.pi)


def tail_line_inverse_square(c, x, K):
    """(1/2pi) * integral over |k| > K of exp(ikx) c / k^2."""
    x = np.asarray(x, dtype=float)
    si, _ = sici(K * x)
    return np.outer(np.cos(K * x) / K - x * (np.pi / 2 - si), c) / np.pi


def tail_rays_inverse_square(c, x, K):
    """(1/2pi) * integral of exp(ikx) c / k^2 over the far pieces of the quadrant boundary."""
    x = np.asarray(x, dtype=float)
    z = K * x
    si, ci = sici(z)
    x_ci = np.zeros_like(z)
    pos = z > 0
    x_ci[pos] = x[pos] * ci[pos]
    line = np.cos(z) / K - x * (np.pi / 2 - si) + 1j * (np.sin(z) / K - x_ci)
    ray = 1j * expn(2, z) / K
    return np.outer(line + ray, c) / (2 * np.pi)


# -- solver --------------------------------------------------------------------

@dataclass
class SpectralDensity:
    """The density q^(k, t) on a node set; ``values[i, j]`` at (k[i], t[j])."""

    variant: str
    k: np.ndarray
    t: np.ndarray
    values: np.ndarray


def _assemble(weights, kern, Q):
    return np.einsum("k,kx,kt->xt", weights, kern, Q) / (2 * np.pi)


def _indent_radii(poles):
    poles = np.asarray(poles, dtype=float)
    radii = []
    for i, p in enumerate(poles):
        others = np.delete(poles, i)
        gap = float(np.min(np.abs(others - p))) if len(others) else np.inf
        if gap < POLE_GUARD:
            raise PoleOnContour(f"coincident poles near k = {p}i")
        radii.append(min(p / 10, 0.4 * gap))
    return radii


class SchrodingerSolver:
    """Spectral solver for one potential and one set of initial/boundary data."""

    def __init__(self, potential, data: SchrodingerData, variant="half_line",
                 cutoff=None, time_step=DEFAULT_STEP, panel_max=PANEL_MAX, jost=None):
        if variant not in ("half_line", "full_line"):
            raise ValueError("variant must be 'half_line' or 'full_line'")
        if variant == "full_line" and potential.domain_kind != "full_line":
            raise ValueError("the full-line variant needs a full-line potential")
        self.potential = potential
        self.data = data
        self.variant = variant
        self.bc = data.bc_kind
        self.jost = jost or JostSolver(potential)
        self.q0 = data.q0
        self.g = as_callable(data.boundary)
        self.time_step = time_step
        self.panel_max = panel_max
        self.K = float(cutoff) if cutoff else cutoff_from_decay(data.q0)
        bs = self.jost.find_bound_states(variant)
        self.p_j, self.a_dot = list(bs.p), list(bs.a_dot)
        self.zeros = self.jost.psi0_zeros() if self.bc == "dirichlet" else self.jost.psix0_zeros()
        self._cache = {}

    # -- building blocks --------------------------------------------------
    @property
    def density_variant(self):
        return f"{self.bc}_{self.variant.replace('_', '')}"

    def _real_nodes(self, x, t):
        x = np.asarray(x, dtype=float)
        rate = float(np.max(np.abs(x), initial=0.0)) + 2 * self.K * float(np.max(t, initial=0.0)) + 1
        width = min(self.panel_max, 2 * np.pi / rate)
        n = int(np.ceil(self.K / width))
        key = ("real", tuple(x), n)
        if key not in self._cache:
            k, wk, wg = Contour([Segment.line(0.0, self.K)]).gk15_nodes(n)
            pos = real_node_data(self.jost, self.q0, k.real, x, self.variant)
            self._cache[key] = (pos, pos.mirrored(), wk.real, wg.real)
        return self._cache[key]

    def _time(self, k, t):
        return time_transform_grid(self.g, k, t, self.time_step)

    def _coeffs(self, nd):
        if self.bc == "dirichlet":
            c0, w0 = nd.phi0, nd.psi0
        else:
            c0, w0 = nd.dphi0, nd.dpsi0
        return c0, w0

    def _check_w0(self, w0):
        if np.any(np.abs(w0) < ZERO_CUTOFF):
            exc = PsiZeroAtOrigin if self.bc == "dirichlet" else PsiXZeroAtOrigin
            raise exc("boundary value of psi vanishes at a quadrature node")

    def density_values(self, nd, gh, t):
        """q^(k,t) = exp(-ik^2 t) [hat q0 - (c0/w0) tilde q0 + (2 k a / w0) hat g]."""
        c0, w0 = self._coeffs(nd)
        self._check_w0(w0)
        k = nd.k
        br = (nd.hat_q0 - c0 / w0 * nd.tilde_q0)[:, None] + (2 * k * nd.a / w0)[:, None] * gh
        return np.exp(-1j * np.outer(k * k, t)) * br

    def density(self, k, t):
        """SpectralDensity at arbitrary k (real or in the upper half-plane)."""
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        real = np.abs(k.imag) < 1e-15
        out = np.empty((len(k), len(t)), dtype=complex)
        if real.any():
            kr = k[real].real
            pos = real_node_data(self.jost, self.q0, np.abs(kr), [0.0], self.variant)
            neg = pos.mirrored()
            vp = self.density_values(pos, self._time(pos.k, t).values, t)
            vn = self.density_values(neg, self._time(pos.k, t).values, t)
            out[real] = np.where((kr > 0)[:, None], vp, vn)
        if (~real).any():
            nd = complex_node_data(self.jost, self.q0, k[~real], [0.0], self.variant, True)
            out[~real] = self.density_values(nd, self._time(nd.k, t).values, t)
        return SpectralDensity(self.density_variant, k, t, out)

    def _bound_nodes(self, x, need_hat=True):
        if not self.p_j:
            return None
        return complex_node_data(self.jost, self.q0, 1j * np.array(self.p_j), x,
                                 self.variant, need_hat)

    def residue_terms(self, x, t, g_hat=None):
        """Contribution of zeros of w0 = psi(0, .) (or psi_x) on the imaginary axis.

        The density omits c0 q~(k,t) / w0 because it integrates to zero when
        w0 has no zeros; each zero z adds i psi(x,z) c0 q~(z,t) / (a(z) w0'(z)),
        with q~(z,t) supplied by the psi global relation (the unknown boundary
        transform drops out there because w0(z) = 0).
        """
        x = np.asarray(x, dtype=float)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((len(x), len(t)), dtype=complex)
        if not self.zeros:
            return out
        z = 1j * np.array(self.zeros)
        nd = complex_node_data(self.jost, self.q0, z, x, self.variant)
        gh = self._time(z, t).values if g_hat is None else g_hat
        c0, _ = self._coeffs(nd)
        deriv = self.bc == "neumann"

        def w0(kk):
            s = self.jost.sweep(kk, "psi", [0.0])
            return (s.deriv() if deriv else s.value())[:, 0]

        for i, s in enumerate(self.zeros):
            dw = self.jost.derivative_on_axis(w0, s)
            if self.bc == "dirichlet":
                br = nd.tilde_q0[i] + 1j * nd.dpsi0[i] * gh[i]
            else:
                br = nd.tilde_q0[i] - 1j * nd.psi0[i] * gh[i]
            qt = np.exp(-1j * z[i] ** 2 * t) * br
            out += 1j * np.outer(nd.psi[i], qt) * c0[i] / (nd.a[i] * dw)
        return out

    # -- representations ----------------------------------------------------
    def reconstruct_field(self, x, t):
        """Real-axis representation plus bound-state sum and residue terms."""
        x = np.asarray(x, dtype=float)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pos, neg, wk, wg = self._real_nodes(x, t)
        gh = self._time(pos.k, t).values
        parts = []
        for w in (wk, wk - wg):
            acc = 0
            for nd in (pos, neg):
                acc = acc + _assemble(w, nd.psi / nd.a[:, None], self.density_values(nd, gh, t))
            parts.append(acc)
        field, err = parts
        discrete = np.zeros_like(field)
        bn = self._bound_nodes(x)
        if bn is not None:
            Qj = self.density_values(bn, self._time(bn.k, t).values, t)
            for j, ad in enumerate(self.a_dot):
                discrete += -1j * np.outer(bn.psi[j], Qj[j]) / ad
        resid = self.residue_terms(x, t)
        gt = self.g(t)
        if self.bc == "dirichlet":
            tail = tail_line(2 * gt, x, self.K)
        else:
            tail = -tail_line_inverse_square(2 * gt, x, self.K)
        values = field + discrete + resid + tail
        extra = {
            "representation": "direct",
            "quadrature_error": float(np.max(np.abs(err))),
            "discrete_term_max": float(np.max(np.abs(discrete), initial=0.0)),
            "residue_term_max": float(np.max(np.abs(resid), initial=0.0)),
        }
        return self._sample(x, t, values, extra)

    def _contour_nodes(self, t):
        poles = sorted(list(self.p_j) + list(self.zeros))
        for p in poles:
            if p >= self.K:
                raise PoleOnContour("a pole lies beyond the contour cutoff")
        radii = _indent_radii(poles) if poles else []
        segs = imaginary_ray_with_indents(self.K, poles, radii, "right")
        rate = 2 * self.K * float(np.max(t, initial=0.0)) + 1
        width = min(self.panel_max, 2 * np.pi / rate)
        panels = [ARC_PANELS if s.kind == "arc" else max(1, int(np.ceil(s.length / width)))
                  for s in segs]
        return Contour(segs).gk15_nodes(panels)

    def _deformed(self, x, t, infinite):
        x = np.asarray(x, dtype=float)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pos, neg, wk, wg = self._real_nodes(x, t)
        kc, wck, wcg = self._contour_nodes(t)
        ray = complex_node_data(self.jost, self.q0, kc, x, self.variant)

        def ghat(k):
            if infinite:
                return np.repeat(time_transform_inf_grid(self.g, k, step=self.time_step)[0][:, None],
                                 len(t), axis=1)
            return self._time(k, t).values

        def first(nd):
            return np.exp(-1j * np.outer(nd.k ** 2, t)) * nd.hat_q0[:, None]

        def third(nd, gh):
            c0, _ = self._coeffs(nd)
            br = -(c0 * nd.tilde_q0 / nd.a)[:, None] + 2 * nd.k[:, None] * gh
            return np.exp(-1j * np.outer(nd.k ** 2, t)) * br

        w_pos = self._coeffs(pos)[1]
        self._check_w0(w_pos)
        gp = ghat(pos.k)
        gr = ghat(kc)
        out = []
        for wr, wc in ((wk, wck), (wk - wg, wck - wcg)):
            acc = _assemble(wr, pos.psi / pos.a[:, None], first(pos))
            acc = acc + _assemble(wr, neg.psi / neg.a[:, None], first(neg))
            acc = acc + _assemble(wr, pos.psi / w_pos[:, None], third(pos, gp))
            acc = acc + _assemble(wc, ray.psi / self._coeffs(ray)[1][:, None], third(ray, gr))
            out.append(acc)
        field, err = out
        discrete = np.zeros_like(field)
        bn = self._bound_nodes(x)
        if bn is not None:
            for j, ad in enumerate(self.a_dot):
                kj = bn.k[j]
                discrete += -1j * np.outer(bn.psi[j], np.exp(-1j * kj ** 2 * t)) * bn.hat_q0[j] / ad
        q00, dq00 = endpoint_values(self.q0)
        g00 = complex(self.g(np.array([0.0]))[0])
        at0 = t == 0
        # boundary-datum part: 2 g/(ik) (Dirichlet) or -2 g/k^2 (Neumann) per unit exp(ikx)
        if infinite:
            c_g = np.where(at0, -g00, 0.0)
        else:
            c_g = np.where(at0, 0.0, self.g(t))
        # initial-datum part at t = 0: q0(0)/(ik) and q0'(0)/k^2 endpoint terms
        c0 = np.where(at0, q00, 0.0)
        c1 = np.where(at0, dq00, 0.0)
        if self.bc == "dirichlet":
            tail = (tail_rays(c0 + 2 * c_g, x, self.K)
                    + tail_rays_inverse_square(c1, x, self.K))
        else:
            tail = (tail_rays(-c0, x, self.K)
                    - tail_rays_inverse_square(2 * c_g + c1, x, self.K))
        tail = tail + tail_line(c0, x, self.K) - tail_line_inverse_square(c1, x, self.K)
        values = field + discrete + tail
        extra = {
            "representation": "longtime" if infinite else "deformed",
            "quadrature_error": float(np.max(np.abs(err))),
            "discrete_term_max": float(np.max(np.abs(discrete), initial=0.0)),
            "indented_poles": [float(p) for p in list(self.p_j) + list(self.zeros)],
        }
        return self._sample(x, t, values, extra)

    def reconstruct_deformed(self, x, t):
        return self._deformed(x, t, infinite=False)

    def reconstruct_longtime(self, x, t):
        return self._deformed(x, t, infinite=True)

    def dirichlet_via_sine_analogue(self, x, t, dx=0.005, chunk=512):
        """Density from the kernel phi - psi/psi(0,k) on a fixed x grid (no elimination)."""
        if self.bc != "dirichlet" or self.variant != "half_line":
            raise ValueError("the sine analogue applies to half-line Dirichlet data")
        x = np.asarray(x, dtype=float)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        pos, neg, wk, wg = self._real_nodes(x, t)
        X = effective_support(lambda s: np.abs(self.q0(s)))
        n = int(np.ceil(X / dx / 2)) * 2
        xq = np.linspace(0.0, X, n + 1)
        simpson = np.full(n + 1, 2.0)
        simpson[1::2] = 4.0
        simpson[[0, -1]] = 1.0
        simpson *= (xq[1] - xq[0]) / 3
        qv = np.asarray(self.q0(xq), dtype=complex) * simpson
        # at -k the kernel is conjugated, so Re and Im parts are transformed separately
        Sr = np.empty(len(pos.k), dtype=complex)
        Si = np.empty_like(Sr)
        for lo in range(0, len(pos.k), chunk):
            kk = pos.k[lo:lo + chunk]
            ps = self.jost.sweep(kk, "psi", xq).value()
            ph = self.jost.sweep(kk, "phi", xq).value()
            ker = ph - ps / ps[:, :1]
            Sr[lo:lo + chunk] = ker @ np.real(qv)
            Si[lo:lo + chunk] = ker @ np.imag(qv)
        S = Sr + 1j * Si
        S_neg = np.conj(Sr) + 1j * np.conj(Si)
        gh = self._time(pos.k, t).values
        out = []
        for w in (wk, wk - wg):
            acc = 0
            for nd, s in ((pos, S), (neg, S_neg)):
                Q = np.exp(-1j * np.outer(nd.k ** 2, t)) * (
                    s[:, None] + (2 * nd.k * nd.a / nd.psi0)[:, None] * gh)
                acc = acc + _assemble(w, nd.psi / nd.a[:, None], Q)
            out.append(acc)
        field, err = out
        resid = self.residue_terms(x, t)
        tail = tail_line(2 * self.g(t), x, self.K)
        values = field + resid + tail
        extra = {"representation": "sine", "quadrature_error": float(np.max(np.abs(err))),
                 "residue_term_max": float(np.max(np.abs(resid), initial=0.0))}
        return self._sample(x, t, values, extra)

    def solve(self, x, t, representation="direct"):
        if representation == "direct":
            return self.reconstruct_field(x, t)
        if representation == "deformed":
            return self.reconstruct_deformed(x, t)
        if representation == "longtime":
            return self.reconstruct_longtime(x, t)
        if representation == "sine":
            return self.dirichlet_via_sine_analogue(x, t)
        raise ValueError(f"unknown representation {representation!r}")

    # -- checks against independent data -----------------------------------
    def psi_transform_of_field(self, k, xg, field, chunk=256):
        """q~(k, t) = integral of psi(x,k) q(x,t) dx for sampled fields (trapezoid)."""
        k = np.atleast_1d(np.asarray(k, dtype=complex))
        w = np.full(len(xg), xg[1] - xg[0])
        w[[0, -1]] *= 0.5
        out = np.empty((len(k), field.shape[1]), dtype=complex)
        for lo in range(0, len(k), chunk):
            ps = self.jost.sweep(k[lo:lo + chunk], "psi", xg).value()
            out[lo:lo + chunk] = (ps * w) @ field
        return out

    def dropped_term_field(self, traces, x, t):
        """Field generated by c0 q~(k,t)/w0 with q~ taken from an independent solution.

        Without zeros of w0 on the imaginary axis this term integrates to zero;
        otherwise it equals :meth:`residue_terms`.
        """
        x = np.asarray(x, dtype=float)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cols = traces.columns(t)
        pos, neg, wk, wg = self._real_nodes(x, t)
        qt = self.psi_transform_of_field(pos.k, traces.x, cols)
        qt_neg = self.psi_transform_of_field(neg.k, traces.x, cols)
        acc = 0
        for nd, q in ((pos, qt), (neg, qt_neg)):
            c0, w0 = self._coeffs(nd)
            acc = acc + _assemble(wk, nd.psi / nd.a[:, None], (c0 / w0)[:, None] * q)
        bn = self._bound_nodes(x, need_hat=False)
        if bn is not None:
            qj = self.psi_transform_of_field(bn.k, traces.x, cols)
            c0, w0 = self._coeffs(bn)
            for j, ad in enumerate(self.a_dot):
                acc = acc - 1j * np.outer(bn.psi[j], c0[j] / w0[j] * qj[j]) / ad
        # c0 q~ / w0 ~ s [q(0,t)/(ik) + q_x(0,t)/k^2], s = -1 (Dirichlet) or +1 (Neumann)
        sign = -1.0 if self.bc == "dirichlet" else 1.0
        return (acc + tail_line(sign * traces.boundary_q(t), x, self.K)
                + tail_line_inverse_square(sign * traces.boundary_qx(t), x, self.K))

    def global_relation_residual(self, traces, k_grid, t):
        """max |e^{ik^2 t} q~(k,t) - q~(k,0) - i psi_x(0,k) g0^ + i psi(0,k) g1^|."""
        k = np.atleast_1d(np.asarray(k_grid, dtype=complex))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cols = traces.columns(np.concatenate([[0.0], t]))
        qt = self.psi_transform_of_field(k, traces.x, cols)
        s = self.jost.sweep(k, "psi", [0.0])
        psi0, dpsi0 = s.value()[:, 0], s.deriv()[:, 0]
        g0h = time_transform_grid((traces.t, traces.q_boundary), k, t, traces.dt).values
        g1h = time_transform_grid((traces.t, traces.qx_boundary), k, t, traces.dt).values
        r = (np.exp(1j * np.outer(k * k, t)) * qt[:, 1:] - qt[:, :1]
             - 1j * dpsi0[:, None] * g0h + 1j * psi0[:, None] * g1h)
        return float(np.max(np.abs(r)))

    # -- diagnostics --------------------------------------------------------
    def _sample(self, x, t, values, extra):
        d = {"pde_residual": schrodinger_residual(values, x, t, self.potential.eval),
             "ic_error": None, "bc_error": None, "cutoff": self.K,
             "bound_states": list(self.p_j),
             "boundary_zeros": list(self.zeros)}
        if np.isnan(d["pde_residual"]):
            d["pde_residual"] = None
        if len(t) and t[0] == 0.0:
            d["ic_error"] = float(np.max(np.abs(values[:, 0] - self.q0(x))))
        if len(x) >= 3 and x[0] == 0.0:
            if self.bc == "dirichlet":
                d["bc_error"] = float(np.max(np.abs(values[0] - self.g(t))))
            else:
                d["bc_error"] = float(np.max(np.abs(one_sided_derivative(values, x) - self.g(t))))
        d.update(extra)
        return FieldSample(x, t, values, d)


# -- functional surface ---------------------------------------------------------

def spectral_density_dirichlet(solver, k, t):
    if solver.bc != "dirichlet":
        raise ValueError("solver holds Neumann data")
    return solver.density(k, t)


def spectral_density_neumann(solver, k, t):
    if solver.bc != "neumann":
        raise ValueError("solver holds Dirichlet data")
    return solver.density(k, t)


def reconstruct_field(solver, x_grid, t_grid):
    return solver.reconstruct_field(x_grid, t_grid)


def reconstruct_deformed(solver, x_grid, t_grid):
    return solver.reconstruct_deformed(x_grid, t_grid)


def reconstruct_longtime(solver, x_grid, t_grid):
    return solver.reconstruct_longtime(x_grid, t_grid)


def dirichlet_via_sine_analogue(solver, x_grid, t_grid):
    return solver.dirichlet_via_sine_analogue(x_grid, t_grid)


def classical_dirichlet(q0, g0, x, t, cutoff=K_MAX, time_step=DEFAULT_STEP, panel_max=PANEL_MAX):
    """u = 0 Dirichlet solution from plane waves only (no Jost machinery).

    q = (1/2pi) int_R e^{ikx - ik^2 t} q0^(k) dk
      + (1/2pi) int_{first-quadrant boundary} e^{ikx - ik^2 t} [2k g0^(k,t) - q0^(-k)] dk
    """
    x = np.asarray(x, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = as_callable(g0)
    K = float(cutoff)
    rate = float(np.max(np.abs(x), initial=0.0)) + 2 * K * float(np.max(t, initial=0.0)) + 1
    width = min(panel_max, 2 * np.pi / rate)
    kr, wr, _ = Contour([Segment.line(-K, K)]).gk15_nodes(int(np.ceil(2 * K / width)))
    segs = [Segment.line(1j * K, 0.0), Segment.line(0.0, K)]
    kc, wc, _ = Contour(segs).gk15_nodes([int(np.ceil(K / width))] * 2)
    Fr = half_line_fourier(q0, kr)
    Fc = half_line_fourier(q0, -kc)
    gh = time_transform_grid(g, kc, t, time_step).values
    E = lambda k: np.exp(1j * np.outer(k, x))
    T = lambda k: np.exp(-1j * np.outer(k * k, t))
    field = np.einsum("k,kx,kt->xt", wr * Fr, E(kr), T(kr))
    field += np.einsum("k,kx,kt->xt", wc, E(kc), T(kc) * (2 * kc[:, None] * gh - Fc[:, None]))
    field /= 2 * np.pi
    q00, dq00 = endpoint_values(q0)
    at0 = t == 0
    c1 = np.where(at0, dq00, 0.0)
    field += tail_rays(np.where(at0, q00, 2 * g(t)), x, K) + tail_rays_inverse_square(c1, x, K)
    field += tail_line(np.where(at0, q00, 0.0), x, K) - tail_line_inverse_square(c1, x, K)
    return field
