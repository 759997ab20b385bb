"""Eigenfunction expansions reproduce the test function they were built from."""

import numpy as np
import pytest

from unitrans import (completeness_reconstruct, completeness_sine_analogue, residue_kernel,
                      zero_potential)

X = np.linspace(0.0, 8.0, 33)


def bump(x):
    return np.exp(-(np.asarray(x, dtype=float) - 3.0) ** 2) + 0j


def edge(x):
    """Nonzero at the origin, so the endpoint tail is exercised."""
    return np.exp(-np.asarray(x, dtype=float) ** 2) * (1 + 0.5j) + 0j


@pytest.mark.parametrize("fn", [bump, edge])
def test_half_line_expansion(fn, sech2_half, gaussian_potential):
    for pot in (zero_potential(), sech2_half, gaussian_potential):
        r = completeness_reconstruct(fn, pot, X)
        assert r.sup_error < 1e-3, (pot.name, r.sup_error)
        assert r.diagnostics["variant"] == "half_line"


@pytest.mark.parametrize("fn, free_tol", [(bump, 1e-4), (edge, 1e-3)])
def test_sine_analogue(fn, free_tol, sech2_half):
    free = completeness_sine_analogue(fn, zero_potential(), X)
    assert free.sup_error < free_tol
    r = completeness_sine_analogue(fn, sech2_half, X)
    assert len(r.diagnostics["boundary_zeros"]) == 1
    assert r.sup_error < 1e-3


def test_residue_contribution_is_needed(sech2_full):
    """Dropping the bound-state term leaves an error of the size of that term."""
    r = completeness_reconstruct(bump, sech2_full, X)
    kern = residue_kernel(sech2_full, X, np.linspace(-10, 14, 2401))
    assert r.sup_error < 1e-3
    assert np.max(np.abs(kern)) > 0.1


def test_residue_kernel_vanishes_without_bound_states():
    assert not np.any(residue_kernel(zero_potential(), X, X))
