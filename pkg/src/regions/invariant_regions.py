#!/usr/bin/env python3
"""
Invariant regions Sigma_{L,Z} of the diagonalized system.

Each of the 2^m regions flips the sign of the eigenvector rows indexed by Z:
- w_l = sum_k u_k sin((m+1-l) k pi / (m+1)) >= 0 for l in L
- -w_z >= 0 for z in Z
Boundary data beta must satisfy the same sign pattern (sign-flipped sums indexed by z).
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List

import numpy as np

from src.spectral.toeplitz import SpectralDecomposition
from src.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class RegionSpec:
    """Partition (L, Z) of {1..m}; indices are 1-based."""

    m: int
    L: FrozenSet[int]
    Z: FrozenSet[int]

    def __post_init__(self):
        full = frozenset(range(1, self.m + 1))
        if self.L & self.Z:
            raise InvalidInputError(f"L and Z overlap: {sorted(self.L & self.Z)}")
        if self.L | self.Z != full:
            raise InvalidInputError(f"L and Z must cover 1..{self.m}")

    @classmethod
    def from_L(cls, m: int, L: Iterable[int]) -> "RegionSpec":
        L = frozenset(int(i) for i in L)
        if not L <= frozenset(range(1, m + 1)):
            raise InvalidInputError(f"L indices must lie in 1..{m}, got {sorted(L)}")
        return cls(m=m, L=L, Z=frozenset(range(1, m + 1)) - L)

    @property
    def signs(self) -> np.ndarray:
        """+1 on L, -1 on Z, ordered by index."""
        return np.array([1.0 if i in self.L else -1.0 for i in range(1, self.m + 1)])

    def flipped(self) -> "RegionSpec":
        return RegionSpec(m=self.m, L=self.Z, Z=self.L)

    def label(self) -> str:
        return f"L={sorted(self.L)} Z={sorted(self.Z)}"


@dataclass(frozen=True, eq=False)
class SignedTransform:
    """
    Sign-flipped sine transform of one region.

    Row l of the signed matrix is signs[l] * V[l]; the inverse flips columns instead.
    Exposes the same V / V_inv / lambdas_bar surface as SpectralDecomposition.
    """

    base: SpectralDecomposition
    signs: np.ndarray

    @property
    def m(self) -> int:
        return self.base.m

    @property
    def lambdas_bar(self) -> np.ndarray:
        return self.base.lambdas_bar

    @property
    def V(self) -> np.ndarray:
        return self.signs[:, None] * self.base.V

    @property
    def V_inv(self) -> np.ndarray:
        return self.base.V_inv * self.signs[None, :]

    def to_w(self, U) -> np.ndarray:
        U = _as_leading(self.m, U, "U")
        return self.V @ U

    def to_u(self, W) -> np.ndarray:
        W = _as_leading(self.m, W, "W")
        return self.V_inv @ W


@dataclass(frozen=True, eq=False)
class RegionCheck:
    """Outcome of a sign test; truthy iff every margin passed."""

    inside: bool
    margins: np.ndarray

    def __bool__(self) -> bool:
        return self.inside


def _as_leading(m: int, X, name: str) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 0 or arr.shape[0] != m:
        raise InvalidInputError(f"{name} must have length {m}, got shape {arr.shape}")
    return arr


def enumerate_regions(m: int) -> List[RegionSpec]:
    """
    All 2^m partitions, binary counting on Z membership with index 1 as the most significant bit.

    For m=2 the order is (L={1,2}), (L={1}), (L={2}), (L={}).
    """
    if m < 2:
        raise InvalidInputError(f"m must be >= 2, got {m}")
    regions = []
    for mask in range(2 ** m):
        Z = frozenset(i for i in range(1, m + 1) if (mask >> (m - i)) & 1)
        regions.append(RegionSpec(m=m, L=frozenset(range(1, m + 1)) - Z, Z=Z))
    return regions


def signed_transform(spec: RegionSpec, dec: SpectralDecomposition) -> SignedTransform:
    if spec.m != dec.m:
        raise InvalidInputError(f"region has m={spec.m}, decomposition has m={dec.m}")
    return SignedTransform(base=dec, signs=spec.signs)


def _signed_margins(spec: RegionSpec, dec: SpectralDecomposition, vector, name: str) -> np.ndarray:
    if spec.m != dec.m:
        raise InvalidInputError(f"region has m={spec.m}, decomposition has m={dec.m}")
    vector = _as_leading(dec.m, vector, name)
    if vector.ndim != 1:
        raise InvalidInputError(f"{name} must be a single m-vector")
    return spec.signs * (dec.V @ vector)


def membership(spec: RegionSpec, dec: SpectralDecomposition, U0, tol: float = DEFAULT_TOL) -> RegionCheck:
    """
    Test U0 against Sigma_{L,Z}.

    Returns:
        RegionCheck with margins signs * to_w(U0); inside iff every margin >= -tol
    """
    if tol < 0:
        raise InvalidInputError(f"tol must be >= 0, got {tol}")
    margins = _signed_margins(spec, dec, U0, "U0")
    return RegionCheck(inside=bool(np.all(margins >= -tol)), margins=margins)


def boundary_compat(spec: RegionSpec, dec: SpectralDecomposition, beta, tol: float = DEFAULT_TOL) -> RegionCheck:
    """Boundary data rho = signed sine sums of beta must be >= -tol on every index."""
    if tol < 0:
        raise InvalidInputError(f"tol must be >= 0, got {tol}")
    margins = _signed_margins(spec, dec, beta, "beta")
    return RegionCheck(inside=bool(np.all(margins >= -tol)), margins=margins)


def accepting_regions(dec: SpectralDecomposition, U0, tol: float = DEFAULT_TOL) -> List[RegionSpec]:
    """Every region whose membership test passes; zero coordinates admit both signs."""
    accepted = [spec for spec in enumerate_regions(dec.m) if membership(spec, dec, U0, tol)]
    logger.debug(f"U0={np.asarray(U0).tolist()} accepted by {len(accepted)} regions")
    return accepted
