#!/usr/bin/env python3
"""
The Lyapunov polynomial H_{p_m} and its closed-form derivatives.

H_{p_m}(W) = sum_{p_{m-1}=0}^{p_m} ... sum_{p_1=0}^{p_2}
             C(p_m, p_{m-1}) ... C(p_2, p_1) theta_1^{p_1^2} ... theta_{m-1}^{p_{m-1}^2}
             w_1^{p_1} w_2^{p_2-p_1} ... w_m^{p_m-p_{m-1}}

Every first and second derivative is the same nested sum at a lower degree with the
theta exponents shifted from p_k^2 to (p_k+1)^2 or (p_k+2)^2. _nested_sum evaluates that
family from the innermost index outward.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from src.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)


class LyapunovConfig(BaseModel):
    """Degree p_m and weights theta_1..theta_{m-1} of H_{p_m}."""

    model_config = ConfigDict(frozen=True)

    p_m: int = Field(ge=2)
    thetas: Tuple[float, ...]

    @field_validator('thetas')
    @classmethod
    def positive_thetas(cls, value):
        if len(value) < 1:
            raise ValueError("need at least one theta (m >= 2)")
        if any(not np.isfinite(t) or t <= 0 for t in value):
            raise ValueError(f"all thetas must be positive, got {value}")
        return value

    @property
    def m(self) -> int:
        return len(self.thetas) + 1


def binomial_table(n: int) -> np.ndarray:
    """Rows C(q, 0..q) for q <= n by the multiplicative recurrence."""
    table = np.zeros((n + 1, n + 1))
    for q in range(n + 1):
        table[q, 0] = 1.0
        for j in range(1, q + 1):
            table[q, j] = table[q, j - 1] * (q - j + 1) / j
    return table


def shift_pattern(m: int, ell: int, kappa: int) -> np.ndarray:
    """
    Exponent shifts s_1..s_{m-1} for the (ell, kappa) second-derivative / condition-matrix entry.

    s_k = 0 for k < ell, 1 for ell <= k < kappa, 2 for k >= kappa (1-based, ell <= kappa).
    """
    ell, kappa = min(ell, kappa), max(ell, kappa)
    k = np.arange(1, m)
    return np.where(k < ell, 0, np.where(k < kappa, 1, 2))


def _nested_sum(thetas: np.ndarray, n: int, shifts: np.ndarray, W: np.ndarray) -> np.ndarray:
    """
    Evaluate sum over 0 <= p_1 <= ... <= p_{m-1} <= n of
    prod C(p_{k+1}, p_k) theta_k^{(p_k + s_k)^2} * w_1^{p_1} prod w_k^{p_k - p_{k-1}}, with p_m = n.

    W has shape (m, N); returns shape (N,).
    """
    m, N = W.shape
    if n < 0:
        return np.zeros(N)

    binom = binomial_table(n)
    p = np.arange(n + 1)
    powers = np.power(W[:, None, :], p[None, :, None])  # (m, n+1, N)

    weight = np.power(thetas[0], (p + shifts[0]) ** 2.0)
    f = weight[:, None] * powers[0]
    for k in range(1, m - 1):
        weight = np.power(thetas[k], (p + shifts[k]) ** 2.0)
        g = np.empty_like(f)
        for q in range(n + 1):
            g[q] = np.sum(binom[q, :q + 1, None] * f[:q + 1] * powers[k, q::-1], axis=0)
        f = weight[:, None] * g
    return np.sum(binom[n, :, None] * f * powers[m - 1, ::-1], axis=0)


def _prepare(cfg: LyapunovConfig, W) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(W, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != cfg.m:
        raise InvalidInputError(f"W must have leading dimension {cfg.m}, got shape {np.shape(W)}")
    if np.any(arr < 0):
        raise InvalidInputError("H is defined on the nonnegative cone; W has negative entries")
    return arr, single


def eval_H(cfg: LyapunovConfig, W):
    """H_{p_m}(W) for an m-vector (scalar result) or an m x N nodal array."""
    arr, single = _prepare(cfg, W)
    thetas = np.asarray(cfg.thetas, dtype=float)
    values = _nested_sum(thetas, cfg.p_m, np.zeros(cfg.m - 1, dtype=int), arr)
    return float(values[0]) if single else values


def grad_H(cfg: LyapunovConfig, W) -> np.ndarray:
    """
    Closed-form gradient.

    Component l is p_m times the degree p_m-1 sum with theta_k raised to (p_k+1)^2 for k >= l
    and p_k^2 for k < l.
    """
    arr, single = _prepare(cfg, W)
    thetas = np.asarray(cfg.thetas, dtype=float)
    m = cfg.m
    k = np.arange(1, m)
    grad = np.empty((m, arr.shape[1]))
    for ell in range(1, m + 1):
        shifts = np.where(k >= ell, 1, 0)
        grad[ell - 1] = cfg.p_m * _nested_sum(thetas, cfg.p_m - 1, shifts, arr)
    return grad[:, 0] if single else grad


def hess_H(cfg: LyapunovConfig, W) -> np.ndarray:
    """Closed-form Hessian, p_m(p_m-1) times the degree p_m-2 sums with the shift_pattern exponents."""
    if cfg.p_m < 2:
        raise InvalidInputError(f"Hessian needs p_m >= 2, got {cfg.p_m}")
    arr, single = _prepare(cfg, W)
    thetas = np.asarray(cfg.thetas, dtype=float)
    m = cfg.m
    factor = cfg.p_m * (cfg.p_m - 1)
    hess = np.empty((m, m, arr.shape[1]))
    for ell in range(1, m + 1):
        for kappa in range(ell, m + 1):
            value = factor * _nested_sum(thetas, cfg.p_m - 2, shift_pattern(m, ell, kappa), arr)
            hess[ell - 1, kappa - 1] = value
            hess[kappa - 1, ell - 1] = value
    return hess[:, :, 0] if single else hess


def make_config(p_m: int, thetas: Sequence[float]) -> LyapunovConfig:
    return LyapunovConfig(p_m=p_m, thetas=tuple(float(t) for t in thetas))
