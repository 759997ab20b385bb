"""Contour quadrature, ODE integration and root bracketing against closed forms."""

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from unitrans import JostSolver, QuadratureFailure, Sech2Params, make_sech2
from unitrans.quadrature import (Contour, Indentation, Segment, bracket_roots, central_derivative,
                                 imaginary_ray_with_indents, integrate_contour, integrate_ode)


def test_constant_on_interval():
    r = integrate_contour(lambda k: np.ones_like(k), Contour([Segment.line(-1.0, 1.0)]))
    assert abs(r.value - 2.0) < 1e-14


def test_exponential_along_imaginary_segment():
    r = integrate_contour(np.exp, Contour([Segment.line(0.0, 1j)]))
    assert abs(r.value - (np.exp(1j) - 1)) < 1e-13


def test_arc_length_and_quarter_circle_integral():
    arc = Segment.arc(0.0, 2.0, 0.0, np.pi / 2)
    assert abs(arc.length - np.pi) < 1e-14
    # integral of 1/k along the arc is i pi / 2
    r = integrate_contour(lambda k: 1 / k, Contour([arc]))
    assert abs(r.value - 0.5j * np.pi) < 1e-12


def _quarter_disc(side, R=3.0):
    segs = [Segment.line(0.0, R), Segment.arc(0.0, R, 0.0, np.pi / 2)]
    segs += imaginary_ray_with_indents(R, [0.5], [0.1], side=side)
    return Contour(segs)


def test_indentation_side_decides_whether_pole_is_enclosed():
    f = lambda k: 1 / (k - 0.5j)
    inside = integrate_contour(f, _quarter_disc("left")).value
    outside = integrate_contour(f, _quarter_disc("right")).value
    assert abs(inside - 2j * np.pi) < 1e-10
    assert abs(outside) < 1e-10


def test_indentation_must_fit_on_ray():
    with pytest.raises(ValueError):
        imaginary_ray_with_indents(1.0, [0.95], [0.1])


def test_contour_validation():
    with pytest.raises(ValueError):
        Contour([Segment.line(0, 1), Segment.line(2, 3)])
    with pytest.raises(ValueError):
        Contour([Segment.line(0, 1)], [Indentation(0.5j, 0.2, "right"), Indentation(0.7j, 0.2, "right")])
    with pytest.raises(ValueError):
        Contour([Segment.line(0, 1)], [Indentation(0.5j, 0.0, "right")])


def test_panel_budget_reports_partial_value():
    with pytest.raises(QuadratureFailure) as info:
        integrate_contour(lambda k: np.abs(k - 1 / 3) ** -0.9, Contour([Segment.line(0.0, 1.0)]),
                          tol=1e-14, max_panels=40)
    assert info.value.value is not None


def test_fixed_panel_nodes_are_exact_for_polynomials():
    c = Contour([Segment.line(0.0, 2.0)])
    k, wk, wg = c.gk15_nodes(3)
    assert abs(np.sum(wk * k**20) - 2.0**21 / 21) < 1e-8
    assert abs(np.sum(wg * k**12) - 2.0**13 / 13) < 1e-10


def test_ode_plane_wave():
    k = 3.0
    rhs = lambda x, y: np.array([y[1], -k * k * y[0]])
    x = np.linspace(0.0, 5.0, 11)
    y = integrate_ode(rhs, 0.0, 5.0, np.array([1.0, 1j * k]), x_eval=x)
    assert np.max(np.abs(y[0] - np.exp(1j * k * x))) < 1e-9


def test_ode_backward_and_trivial_span():
    rhs = lambda x, y: -y
    y = integrate_ode(rhs, 2.0, 0.0, np.array([1.0]))
    assert abs(y[0] - np.exp(2.0)) < 1e-9
    assert integrate_ode(rhs, 1.0, 1.0, np.array([4.0]))[0] == 4.0


def test_oscillator_energy_is_conserved():
    rhs = lambda x, y: np.array([y[1], -y[0]])
    y = integrate_ode(rhs, 0.0, 100.0, np.array([1.0, 0.0]))
    assert abs(y[0] ** 2 + y[1] ** 2 - 1) < 1e-8


def test_bracket_roots_simple_and_double():
    assert np.allclose(bracket_roots(lambda p: p - 1, (0.0, 3.0)), [1.0], atol=1e-12)
    assert bracket_roots(lambda p: (p - 1) ** 2 + 0 * p, (0.1, 3.0), n_scan=401) == []


def test_central_derivative_order():
    d = central_derivative(np.sin, 0.3, 1e-2)
    assert abs(d - np.cos(0.3)) < 1e-8


def _lowest_eigenvalue(u, lo, hi, h):
    x = np.arange(lo + h, hi, h)
    diag = 2 / h**2 - u(x)
    off = -np.ones(len(x) - 1) / h**2
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))[0][0]


def test_scaled_sech2_bound_state_against_matrix_and_closed_form():
    s = 0.99
    pot = make_sech2(Sech2Params(1.0, 2.0), "full_line", scale=s)
    p = JostSolver(pot).find_bound_states("full_line").p
    assert len(p) == 1
    closed = (-1 + np.sqrt(1 + 8 * s)) / 2
    lam = [_lowest_eigenvalue(pot.eval, -18.0, 22.0, h) for h in (0.02, 0.01)]
    richardson = (4 * lam[1] - lam[0]) / 3
    assert abs(p[0] - closed) < 1e-8
    assert abs(p[0] - np.sqrt(-richardson)) < 1e-5
