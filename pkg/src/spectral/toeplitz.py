#!/usr/bin/env python3
"""
Closed-form spectral theory of the tridiagonal symmetric Toeplitz diffusion matrix.

For the m x m matrix A with diagonal a and off-diagonals b:
- eigenvalues lambda_l = a + 2b cos(l pi / (m+1)), strictly decreasing in l
- eigenvectors v_l[k] = sin(k l pi / (m+1))
- ascending reindexing lambda_bar_l = lambda_{m+1-l}

Row l of the sine matrix V maps U to w_l and carries lambda_bar_l, so V A = diag(lambda_bar) V.
Nothing here calls a generic eigensolver.
"""

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


class ToeplitzSystem(BaseModel):
    """Component count m and diffusion coefficients (a, b) of the system."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=2)
    a: float = Field(gt=0)
    b: float = Field(gt=0)

    @property
    def parabolic(self) -> bool:
        return parabolicity_check(self)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """
    Eigen-data of A in both orderings plus the sine transform and its inverse.

    Attributes:
        m: Component count
        lambdas: Natural order lambda_1..lambda_m (strictly decreasing)
        lambdas_bar: Ascending order, lambdas_bar[l-1] = lambdas[m-l]
        V: Sine matrix, V[l-1, k-1] = sin((m+1-l) k pi / (m+1))
        V_inv: Explicit inverse, inv_scale * V.T
        inv_scale: 2 / (m+1)
    """

    m: int
    lambdas: np.ndarray
    lambdas_bar: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray
    inv_scale: float

    def natural_index(self, ell: int) -> int:
        """1-based natural index carried by ascending index ell (ell <-> m+1-ell)."""
        if not 1 <= ell <= self.m:
            raise InvalidInputError(f"index {ell} outside 1..{self.m}")
        return self.m + 1 - ell

    def eigenvector(self, natural_ell: int) -> np.ndarray:
        """Eigenvector v_l for natural 1-based index l; it is row m+1-l of V."""
        return self.V[self.m - natural_ell].copy()

    def to_w(self, U) -> np.ndarray:
        return to_w(self, U)

    def to_u(self, W) -> np.ndarray:
        return to_u(self, W)


def parabolicity_check(sys: ToeplitzSystem) -> bool:
    """True iff 2b cos(pi/(m+1)) < a strictly."""
    return bool(2.0 * sys.b * np.cos(np.pi / (sys.m + 1)) < sys.a)


def diffusion_matrix(sys: ToeplitzSystem) -> np.ndarray:
    """The explicit tridiagonal Toeplitz matrix A."""
    A = np.zeros((sys.m, sys.m))
    np.fill_diagonal(A, sys.a)
    np.fill_diagonal(A[1:], sys.b)
    np.fill_diagonal(A[:, 1:], sys.b)
    return A


def sine_matrix(m: int) -> np.ndarray:
    """V[l-1, k-1] = sin((m+1-l) k pi / (m+1))."""
    rows = (m + 1 - np.arange(1, m + 1))[:, None]
    cols = np.arange(1, m + 1)[None, :]
    return np.sin(rows * cols * np.pi / (m + 1))


def decompose(sys: ToeplitzSystem) -> SpectralDecomposition:
    """
    Build the spectral decomposition from the closed forms.

    Args:
        sys: Validated Toeplitz system (m >= 2, a > 0, b > 0)

    Returns:
        SpectralDecomposition with both eigenvalue orderings and V, V^-1
    """
    if not isinstance(sys, ToeplitzSystem):
        raise InvalidInputError(f"expected ToeplitzSystem, got {type(sys).__name__}")

    m = sys.m
    ell = np.arange(1, m + 1)
    lambdas = sys.a + 2.0 * sys.b * np.cos(ell * np.pi / (m + 1))
    lambdas_bar = lambdas[::-1].copy()

    V = sine_matrix(m)
    inv_scale = 2.0 / (m + 1)
    V_inv = inv_scale * V.T

    for arr in (lambdas, lambdas_bar, V, V_inv):
        arr.setflags(write=False)

    logger.debug(f"Decomposed m={m}, a={sys.a}, b={sys.b}: lambda_bar={lambdas_bar}")
    return SpectralDecomposition(
        m=m,
        lambdas=lambdas,
        lambdas_bar=lambdas_bar,
        V=V,
        V_inv=V_inv,
        inv_scale=inv_scale,
    )


def _check_leading_dim(dec_m: int, X, name: str) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0 or arr.shape[0] != dec_m:
        raise InvalidInputError(f"{name} must have leading dimension {dec_m}, got shape {arr.shape}")
    return arr


def to_w(dec: SpectralDecomposition, U) -> np.ndarray:
    """
    Sine transform w_l = sum_k U_k sin((m+1-l) k pi / (m+1)).

    Accepts an m-vector or an m x n array of nodal values (applied per node).
    """
    U = _check_leading_dim(dec.m, U, "U")
    return dec.V @ U


def to_u(dec: SpectralDecomposition, W) -> np.ndarray:
    """Inverse transform through the explicit (2/(m+1)) V^T."""
    W = _check_leading_dim(dec.m, W, "W")
    return dec.V_inv @ W


def eigen_residuals(sys: ToeplitzSystem, dec: SpectralDecomposition) -> np.ndarray:
    """||A v - lambda_bar v||_inf / ||v||_inf for each row v of V."""
    A = diffusion_matrix(sys)
    residuals = np.empty(dec.m)
    for i in range(dec.m):
        v = dec.V[i]
        residuals[i] = np.max(np.abs(A @ v - dec.lambdas_bar[i] * v)) / np.max(np.abs(v))
    return residuals
