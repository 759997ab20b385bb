"""Eigenfunction expansions: reconstructing a test function from its transforms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jost import JostSolver
from .quadrature import Contour, Segment
from .schrodinger import (PANEL_MAX, ZERO_CUTOFF, complex_node_data, cutoff_from_decay,
                          endpoint_values, real_node_data, tail_line)
from .errors import PoleOnContour


@dataclass
class Reconstruction:
    x: np.ndarray
    values: np.ndarray
    sup_error: float
    diagnostics: dict = field(default_factory=dict)


def _variant(potential, variant):
    if variant is None:
        return "full_line" if potential.domain_kind == "full_line" else "half_line"
    return variant


def _nodes(K, x, panel_max):
    width = min(panel_max, 2 * np.pi / (float(np.max(np.abs(x), initial=0.0)) + 1))
    k, wk, wg = Contour([Segment.line(0.0, K)]).gk15_nodes(int(np.ceil(K / width)))
    return k.real, wk.real, wg.real


def _sweep_both(nd, weights, transform_pos, transform_neg):
    neg = nd.mirrored()
    kern = lambda n: n.psi / n.a[:, None]
    return (np.einsum("k,kx,k->x", weights, kern(nd), transform_pos)
            + np.einsum("k,kx,k->x", weights, kern(neg), transform_neg)) / (2 * np.pi)


def completeness_reconstruct(test_fn, potential, x_grid, variant=None, cutoff=None,
                             panel_max=PANEL_MAX, jost=None):
    """f(x) = (1/2pi) int psi/a f^ dk - i sum psi(x,k_j) f^(k_j)/a'(k_j), f^ = int phi f."""
    variant = _variant(potential, variant)
    jost = jost or JostSolver(potential)
    x = np.asarray(x_grid, dtype=float)
    K = float(cutoff) if cutoff else cutoff_from_decay(test_fn)
    k, wk, wg = _nodes(K, x, panel_max)
    nd = real_node_data(jost, test_fn, k, x, variant)
    neg = nd.mirrored()
    values = _sweep_both(nd, wk, nd.hat_q0, neg.hat_q0)
    quad_err = float(np.max(np.abs(values - _sweep_both(nd, wg, nd.hat_q0, neg.hat_q0))))
    f0, _ = endpoint_values(test_fn)
    values = values + tail_line(np.array([f0]), x, K)[:, 0]
    bs = jost.find_bound_states(variant)
    if bs.p:
        bn = complex_node_data(jost, test_fn, 1j * np.asarray(bs.p), x, variant, need_hat=True)
        for j, ad in enumerate(bs.a_dot):
            values = values - 1j * bn.psi[j] * bn.hat_q0[j] / ad
    err = float(np.max(np.abs(values - test_fn(x))))
    return Reconstruction(x, values, err, {"cutoff": K, "bound_states": list(bs.p),
                                           "quadrature_error": quad_err, "variant": variant})


def completeness_sine_analogue(test_fn, potential, x_grid, cutoff=None, panel_max=PANEL_MAX,
                               jost=None):
    """Expansion with kernel phi - psi/psi(0,k) (half-line Dirichlet relation).

    Bound states contribute through the modified transform and each zero kappa
    of psi(0, .) adds i psi(x,kappa) f~(kappa) / (a(kappa) d/dk psi(0,kappa)).
    """
    jost = jost or JostSolver(potential)
    x = np.asarray(x_grid, dtype=float)
    K = float(cutoff) if cutoff else cutoff_from_decay(test_fn)
    k, wk, wg = _nodes(K, x, panel_max)
    nd = real_node_data(jost, test_fn, k, x, "half_line")
    if np.any(np.abs(nd.psi0) < ZERO_CUTOFF):
        raise PoleOnContour("psi(0, k) vanishes on the integration contour")
    neg = nd.mirrored()
    T = lambda n: n.hat_q0 - n.tilde_q0 / n.psi0
    values = _sweep_both(nd, wk, T(nd), T(neg))
    quad_err = float(np.max(np.abs(values - _sweep_both(nd, wg, T(nd), T(neg)))))
    f0, _ = endpoint_values(test_fn)
    values = values + tail_line(np.array([2 * f0]), x, K)[:, 0]
    bs = jost.find_bound_states("half_line")
    if bs.p:
        bn = complex_node_data(jost, test_fn, 1j * np.asarray(bs.p), x, "half_line", need_hat=True)
        for j, ad in enumerate(bs.a_dot):
            values = values - 1j * bn.psi[j] * (bn.hat_q0[j] - bn.tilde_q0[j] / bn.psi0[j]) / ad
    zeros = jost.psi0_zeros()
    if zeros:
        zn = complex_node_data(jost, test_fn, 1j * np.asarray(zeros), x, "half_line")

        def w0(kk):
            return jost.sweep(kk, "psi", [0.0]).value()[:, 0]

        for i, s in enumerate(zeros):
            dw = jost.derivative_on_axis(w0, s)
            values = values + 1j * zn.psi[i] * zn.tilde_q0[i] / (zn.a[i] * dw)
    err = float(np.max(np.abs(values - test_fn(x))))
    return Reconstruction(x, values, err, {"cutoff": K, "bound_states": list(bs.p),
                                           "boundary_zeros": list(zeros),
                                           "quadrature_error": quad_err})


def residue_kernel(potential, x, xp, variant=None, jost=None):
    """-i psi(x, k_j) phi(x', k_j) / a'(k_j) summed over bound states, on an (x, x') grid."""
    variant = _variant(potential, variant)
    jost = jost or JostSolver(potential)
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    bs = jost.find_bound_states(variant)
    out = np.zeros((len(x), len(xp)), dtype=complex)
    if not bs.p:
        return out
    kj = 1j * np.asarray(bs.p)
    psi = jost.sweep(kj, "psi", x).value()
    kind = "phi" if variant == "half_line" else "Phi"
    phi = jost.sweep(kj, kind, xp).value()
    for j, ad in enumerate(bs.a_dot):
        out += -1j * np.outer(psi[j], phi[j]) / ad
    return out
