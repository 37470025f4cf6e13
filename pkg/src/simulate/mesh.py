#!/usr/bin/env python3
"""
Uniform 1-D mesh on [0, X], boundary conditions per diagonalized component, discrete norms.

Boundary condition on component w_l (outward normal derivative d_eta):
    alpha_l w_l + (1 - alpha_l) d_eta w_l = rho_l
- Neumann: alpha = 0, rho = 0
- Dirichlet (homogeneous): alpha = 1, rho = 0
- Robin: 0 < alpha < 1, so d_eta w = gamma - sigma w with sigma = alpha/(1-alpha), gamma = rho/(1-alpha)
rho is the region's signed sine transform of the u-space data beta.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

BOUNDARY_KINDS = ('neumann', 'dirichlet', 'robin')
ZERO_DATA_TOL = 1e-12


def _as_list(value) -> list:
    return [] if value is None else list(np.ravel(value))


class Mesh1D(BaseModel):
    """Vertex-centred mesh with n_cells + 1 nodes, both endpoints included."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    X: float = Field(gt=0)
    n_cells: int = Field(ge=8)

    @property
    def h(self) -> float:
        return self.X / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.X, self.n_nodes)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights divided by |Omega|, so weights @ u is the mean of u."""
        w = np.full(self.n_nodes, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w / self.X


class BoundarySpec(BaseModel):
    """
    One boundary kind and alpha per w-component, plus u-space data beta (length m).

    alpha may be omitted for Neumann/Dirichlet components; it is filled in as 0 or 1.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    kinds: Tuple[str, ...]
    alpha: Tuple[float, ...] = ()
    beta: Tuple[float, ...] = ()

    @model_validator(mode='before')
    @classmethod
    def fill_defaults(cls, data):
        if not isinstance(data, dict):
            return data
        kinds = tuple(data.get('kinds') or ())
        m = len(kinds)
        if m < 1:
            raise ValueError("at least one boundary kind is required")
        unknown = [k for k in kinds if k not in BOUNDARY_KINDS]
        if unknown:
            raise ValueError(f"unknown boundary kind(s) {unknown}; expected one of {BOUNDARY_KINDS}")

        alpha = _as_list(data.get('alpha')) or [None] * m
        if len(alpha) != m:
            raise ValueError(f"alpha needs {m} entries, got {len(alpha)}")
        for i, (kind, a) in enumerate(zip(kinds, alpha)):
            if kind == 'neumann':
                if a not in (None, 0.0):
                    raise ValueError(f"component {i + 1}: Neumann requires alpha = 0")
                alpha[i] = 0.0
            elif kind == 'dirichlet':
                if a not in (None, 1.0):
                    raise ValueError(f"component {i + 1}: Dirichlet requires alpha = 1")
                alpha[i] = 1.0
            elif a is None or not 0.0 < float(a) < 1.0:
                raise ValueError(f"component {i + 1}: Robin requires 0 < alpha < 1, got {a}")

        beta = tuple(_as_list(data.get('beta')) or [0.0] * m)
        if len(beta) != m:
            raise ValueError(f"beta needs {m} entries, got {len(beta)}")
        return {**data, 'kinds': kinds, 'alpha': tuple(alpha), 'beta': beta}

    @classmethod
    def uniform(cls, kind: str, m: int, alpha: Optional[float] = None,
                beta: Optional[Sequence[float]] = None) -> "BoundarySpec":
        return cls(
            kinds=(kind,) * m,
            alpha=() if alpha is None else (float(alpha),) * m,
            beta=() if beta is None else tuple(float(b) for b in beta),
        )

    @property
    def m(self) -> int:
        return len(self.kinds)

    @property
    def dirichlet(self) -> np.ndarray:
        return np.array([k == 'dirichlet' for k in self.kinds])

    def w_coefficients(self, transform) -> Tuple[np.ndarray, np.ndarray]:
        """
        (sigma, gamma) for the ghost-node closure d_eta w = gamma - sigma w.

        Both are zero on Neumann and Dirichlet components; the transformed data must vanish there.
        """
        if transform.m != self.m:
            raise InvalidInputError(f"boundary spec has m={self.m}, transform has m={transform.m}")
        rho = transform.to_w(np.asarray(self.beta, dtype=float))
        alpha = np.asarray(self.alpha)
        robin = np.array([k == 'robin' for k in self.kinds])

        scale = max(1.0, float(np.max(np.abs(self.beta))))
        bad = ~robin & (np.abs(rho) > ZERO_DATA_TOL * scale)
        if np.any(bad):
            raise InvalidInputError(
                f"components {(np.flatnonzero(bad) + 1).tolist()} are Neumann/Dirichlet but their "
                f"transformed boundary data is nonzero: {rho[bad].tolist()}"
            )

        sigma = np.where(robin, alpha / np.where(robin, 1.0 - alpha, 1.0), 0.0)
        gamma = np.where(robin, rho / np.where(robin, 1.0 - alpha, 1.0), 0.0)
        return sigma, gamma


def trapezoid_mean(u, mesh: Mesh1D) -> np.ndarray:
    """(1/|Omega|) integral of u along the last axis."""
    return np.asarray(u, dtype=float) @ mesh.weights


def lp_norm(u, p: float, mesh: Mesh1D):
    """||u||_p with the 1/|Omega| normalization, per component for m x n input."""
    if p < 1:
        raise InvalidInputError(f"p must be >= 1, got {p}")
    return trapezoid_mean(np.abs(np.asarray(u, dtype=float)) ** p, mesh) ** (1.0 / p)


def sup_norm(u):
    """Max of |u| over every node, endpoints included; NaN propagates."""
    with np.errstate(invalid='ignore'):
        return np.max(np.abs(np.asarray(u, dtype=float)), axis=-1)


def continuous_max(u):
    """Max over the closed domain. Nodal data is continuous, so this is sup_norm."""
    return sup_norm(u)


def initial_field(u0: Sequence[float], mesh: Mesh1D, profile: str = 'constant', amplitude: float = 0.5,
                  noise: float = 0.0, seed: int = 0) -> np.ndarray:
    """
    U0(x) = u0 * g(x) * (1 + noise * xi(x)), one xi(x) ~ U[0, 1) per node from a seeded generator.

    g is 1, 1 + amplitude cos(pi x / X) or sin(pi x / X). g >= 0, so every node lies in the
    same cone as u0.
    """
    u0 = np.asarray(u0, dtype=float)
    x = mesh.nodes
    if profile == 'constant':
        g = np.ones_like(x)
    elif profile == 'cosine':
        if not 0.0 <= amplitude <= 1.0:
            raise InvalidInputError(f"cosine amplitude must lie in [0, 1], got {amplitude}")
        g = 1.0 + amplitude * np.cos(np.pi * x / mesh.X)
    elif profile == 'sine':
        g = np.sin(np.pi * x / mesh.X)
        g[[0, -1]] = 0.0
    else:
        raise InvalidInputError(f"unknown initial profile '{profile}'")
    if noise < 0:
        raise InvalidInputError(f"noise must be >= 0, got {noise}")

    xi = np.random.default_rng(seed).random(x.size)
    return u0[:, None] * (g * (1.0 + noise * xi))[None, :]
