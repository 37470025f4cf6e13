#!/usr/bin/env python3
"""
Quantities recorded along a run: the Lyapunov functional, the Gronwall pair fitted to
Z = L^{1/p_m}, and the L^p corollary ratio.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.lyapunov.functional import LyapunovConfig, eval_H
from src.simulate.mesh import Mesh1D, trapezoid_mean

logger = logging.getLogger(__name__)

GRONWALL_SLACK = 1e-9


@dataclass(frozen=True)
class GronwallFit:
    """
    p_m (Z_{i+1} - Z_i) / dt_i <= C6 Z_i + C8 over the recorded steps.

    Attributes:
        C6: Least-squares slope, clipped at 0
        C8: Smallest offset making the inequality hold at every step, clipped at 0
        worst_slack: min_i (C6 Z_i + C8 - y_i), scaled by max(1, max |y|)
        holds: worst_slack >= -1e-9. C8 is chosen so this is true up to round-off; the
            informative outputs are C6 and C8 themselves
    """

    C6: float
    C8: float
    worst_slack: float
    holds: bool


def lyapunov_functional(W, cfg: LyapunovConfig, mesh: Mesh1D) -> float:
    """L = (1/|Omega|) integral of H_{p_m}(W(x)); round-off negatives of W are clipped to 0."""
    with np.errstate(over='ignore', invalid='ignore'):
        H = eval_H(cfg, np.clip(W, 0.0, None))
        return float(trapezoid_mean(H, mesh))


def fit_gronwall(t, Z, p_m: int) -> GronwallFit:
    """Fit then certify (C6, C8) on the discrete series; non-finite samples are ignored."""
    t, Z = np.asarray(t, dtype=float), np.asarray(Z, dtype=float)
    with np.errstate(invalid='ignore', over='ignore'):
        y = p_m * np.diff(Z) / np.diff(t)
    x = Z[:-1]
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size == 0:
        return GronwallFit(C6=0.0, C8=0.0, worst_slack=0.0, holds=True)

    if x.size >= 2 and np.ptp(x) > 0:
        design = np.column_stack([x, np.ones_like(x)])
        slope = float(np.linalg.lstsq(design, y, rcond=None)[0][0])
    else:
        slope = 0.0
    C6 = max(slope, 0.0)
    C8 = max(float(np.max(y - C6 * x)), 0.0)

    scale = max(1.0, float(np.max(np.abs(y))))
    worst = float(np.min(C6 * x + C8 - y)) / scale
    fit = GronwallFit(C6=C6, C8=C8, worst_slack=worst, holds=worst >= -GRONWALL_SLACK)
    logger.debug(f"Gronwall fit: C6={C6:.6g}, C8={C8:.6g}, worst slack {worst:.3e}")
    return fit


def lp_mass(W, p_m: int, mesh: Mesh1D) -> float:
    """(1/|Omega|) integral of (sum_l w_l)^{p_m}."""
    with np.errstate(over='ignore', invalid='ignore'):
        return float(trapezoid_mean(np.clip(W, 0.0, None).sum(axis=0) ** p_m, mesh))


def corollary_ratio(lp_series, L_series) -> float:
    """max_t lp_mass / L over samples with L > 0; 0 when L never is positive."""
    lp, L = np.asarray(lp_series, dtype=float), np.asarray(L_series, dtype=float)
    keep = np.isfinite(lp) & np.isfinite(L) & (L > 0)
    if not np.any(keep):
        return 0.0
    return float(np.max(lp[keep] / L[keep]))
