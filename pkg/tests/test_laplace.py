"""Laplace quarter-plane solver: preconditions, spectral identities and boundary transforms."""

import numpy as np
import pytest

from unitrans import (BoundStatePresent, LaplaceData, LaplaceSpectralFns, PoleOnContour,
                      algebraic_boundary_transform, exponential_transform, mu_functions_check,
                      rh_jump_residual, solve_algebraic, zero_potential)

KAPPA = np.array([0.3, 1.0, 2.5])


def _gauss(s):
    return np.exp(-(np.asarray(s, dtype=float) - 3) ** 2)


def test_attractive_potential_rejected(sech2_half):
    with pytest.raises(BoundStatePresent):
        LaplaceSpectralFns(sech2_half, LaplaceData(_gauss, _gauss))


def test_algebraic_preconditions():
    x = np.linspace(0, 2, 3)
    with pytest.raises(PoleOnContour):
        solve_algebraic(zero_potential(), LaplaceData(_gauss, _gauss, gamma1=1.0), x, x)
    with pytest.raises(ValueError):
        solve_algebraic(zero_potential(), LaplaceData(_gauss, _gauss, beta=0.5), x, x)


def test_spectral_argument_checks(laplace_free):
    with pytest.raises(ValueError):
        laplace_free.spectral_fns.evaluate([1 - 0.5j])
    with pytest.raises(ValueError):
        rh_jump_residual(lambda k: 0 * k, laplace_free.spectral_fns, 0.0, [1.0])


def test_jump_factor_for_robin_data(laplace_shallow):
    """With beta = 0 the D factors cancel and J = (k + gamma1) / (k - gamma1)."""
    k = 1j * KAPPA
    g1 = laplace_shallow.data.gamma1
    sv = laplace_shallow.spectral_fns.evaluate(k)
    assert np.max(np.abs(sv.J - (k + g1) / (k - g1))) < 1e-12
    assert np.max(np.abs(np.abs(sv.J) - 1)) < 1e-12


def test_exponential_transform_closed_form():
    y = np.linspace(0.0, 40.0, 4001)
    got = exponential_transform(y, np.exp(-y), 1j * KAPPA)
    assert np.max(np.abs(got - 1 / (1 - 1j * KAPPA))) < 1e-4


def test_free_spectral_values(laplace_free):
    """For u = 0, psi(0,k) = 1 and psi_x(0,k) = ik, so D = ik + gamma2 and a = 1."""
    k = np.array([0.7, -1.2, 0.5 + 1j, 2j])
    sv = laplace_free.spectral_fns.evaluate(k)
    g2 = laplace_free.data.gamma2
    assert np.max(np.abs(sv.psi0 - 1)) < 1e-12
    assert np.max(np.abs(sv.a - 1)) < 1e-12
    assert np.max(np.abs(sv.D - (1j * k + g2))) < 1e-12


@pytest.mark.parametrize("name", ["laplace_free", "laplace_shallow"])
def test_boundary_transform_against_oracle_trace(name, request):
    case = request.getfixturevalue(name)
    alg = algebraic_boundary_transform(case.potential, case.data, KAPPA,
                                       spectral_fns=case.spectral_fns)
    o = case.oracle(0.025)
    fd = exponential_transform(o.y, o.q_left, 1j * KAPPA)
    assert np.max(np.abs(alg - fd)) < 1e-3


def test_mu_functions(laplace_shallow):
    r = mu_functions_check(laplace_shallow.spectral_fns.jost, laplace_shallow.algebraic,
                           [1 + 1j, 2 + 0.5j, -1 + 1j, 0.2 + 0.5j])
    assert max(r["pde_residual"]) < 1e-2          # second differences on a 0.1 grid
    assert max(r["jump_residual"]) < 1e-10
    assert max(r["decay"]) < 5.0


def test_algebraic_diagnostics(laplace_shallow):
    d = laplace_shallow.algebraic.diagnostics
    assert d["representation"] == "algebraic"
    assert d["quadrature_error"] < 1e-6
    assert d["max_imag"] < 1e-8
