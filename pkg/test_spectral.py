#!/usr/bin/env python3
"""
Tests for the closed-form Toeplitz spectrum and the sine transform.
"""

import logging

import numpy as np
import pytest
from pydantic import ValidationError

from src.spectral import (
    ToeplitzSystem,
    decompose,
    diffusion_matrix,
    eigen_residuals,
    parabolicity_check,
    sine_matrix,
    to_u,
    to_w,
)
from src.utils.errors import InvalidInputError

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@pytest.fixture
def small_system():
    return ToeplitzSystem(m=2, a=3.0, b=1.0)


def test_m2_closed_form(small_system):
    dec = decompose(small_system)
    np.testing.assert_allclose(dec.lambdas, [4.0, 2.0], atol=1e-14)
    np.testing.assert_allclose(dec.lambdas_bar, [2.0, 4.0], atol=1e-14)
    assert small_system.parabolic


def test_m3_closed_form():
    dec = decompose(ToeplitzSystem(m=3, a=2.0, b=0.5))
    np.testing.assert_allclose(dec.lambdas, [2.0 + np.sqrt(2) / 2, 2.0, 2.0 - np.sqrt(2) / 2], atol=1e-14)
    np.testing.assert_allclose(dec.lambdas, [2.7071, 2.0, 1.2929], atol=1e-4)


@pytest.mark.parametrize("m", [3, 5, 7, 9])
def test_middle_eigenvalue_is_diagonal_for_odd_m(m):
    dec = decompose(ToeplitzSystem(m=m, a=2.5, b=0.7))
    assert dec.lambdas[(m + 1) // 2 - 1] == pytest.approx(2.5, abs=1e-14)
    assert dec.lambdas_bar[(m + 1) // 2 - 1] == pytest.approx(2.5, abs=1e-14)


def test_m2_transform_by_hand(small_system):
    dec = decompose(small_system)
    r3 = np.sqrt(3.0)
    np.testing.assert_allclose(to_u(dec, [r3 / 2, 3 * r3 / 2]), [2.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(to_w(dec, [2.0, 1.0]), [r3 / 2, 3 * r3 / 2], atol=1e-14)
    assert to_w(dec, [1.0, 2.0])[0] == pytest.approx(-r3 / 2)


def test_parabolicity_threshold():
    assert not parabolicity_check(ToeplitzSystem(m=9, a=1.0, b=1.0))
    assert parabolicity_check(ToeplitzSystem(m=9, a=2.0, b=1.0))


@pytest.mark.parametrize("m,a,b", [(2, 3.0, 1.0), (5, 2.0, 0.5), (17, 9.0, 4.0), (64, 10.0, 4.9)])
def test_matches_dense_eigensolver(m, a, b):
    sys = ToeplitzSystem(m=m, a=a, b=b)
    dec = decompose(sys)
    np.testing.assert_allclose(dec.lambdas_bar, np.linalg.eigvalsh(diffusion_matrix(sys)), atol=1e-10)
    assert np.all(np.diff(dec.lambdas_bar) > 0)
    assert np.max(eigen_residuals(sys, dec)) <= 1e-10


@pytest.mark.parametrize("m", [2, 3, 8, 33])
def test_sine_matrix_orthogonality(m):
    V = sine_matrix(m)
    np.testing.assert_allclose(V @ V.T, 0.5 * (m + 1) * np.eye(m), atol=1e-10)
    dec = decompose(ToeplitzSystem(m=m, a=2.0 * m, b=1.0))
    np.testing.assert_allclose(dec.V_inv @ dec.V, np.eye(m), atol=1e-12)


def test_rows_diagonalize_A():
    sys = ToeplitzSystem(m=6, a=2.5, b=1.1)
    dec = decompose(sys)
    A = diffusion_matrix(sys)
    np.testing.assert_allclose(dec.V @ A, np.diag(dec.lambdas_bar) @ dec.V, atol=1e-12)


def test_natural_eigenvectors():
    sys = ToeplitzSystem(m=4, a=3.0, b=1.0)
    dec = decompose(sys)
    A = diffusion_matrix(sys)
    for ell in range(1, 5):
        v = dec.eigenvector(ell)
        np.testing.assert_allclose(A @ v, dec.lambdas[ell - 1] * v, atol=1e-12)
        assert dec.natural_index(ell) == 5 - ell


def test_transform_nodewise_roundtrip():
    dec = decompose(ToeplitzSystem(m=3, a=2.0, b=0.5))
    U = np.random.default_rng(1).normal(size=(3, 40))
    W = to_w(dec, U)
    np.testing.assert_allclose(W[:, 7], dec.V @ U[:, 7])
    np.testing.assert_allclose(to_u(dec, W), U, atol=1e-12)


def test_decomposition_arrays_read_only(small_system):
    dec = decompose(small_system)
    with pytest.raises(ValueError):
        dec.V[0, 0] = 1.0


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        ToeplitzSystem(m=1, a=1.0, b=1.0)
    with pytest.raises(ValidationError):
        ToeplitzSystem(m=3, a=1.0, b=0.0)
    dec = decompose(ToeplitzSystem(m=3, a=2.0, b=0.5))
    with pytest.raises(InvalidInputError):
        to_w(dec, np.ones(2))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
