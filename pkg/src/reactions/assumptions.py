#!/usr/bin/env python3
"""
Sampling falsifiers for the structural assumptions on F.

- quasipositivity: F_l(W) >= 0 whenever w_l = 0
- polynomial growth: |F_l(W)| <= C1 (1 + sum w)^N
- balance: sum_{l<m} D_l F_l(W) + F_m(W) <= C2 (1 + sum w)

Points are drawn uniformly from a box in the nonnegative cone with a seeded generator; the
top corner of the box is always included. A passing report means no counterexample was found.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.reactions.polynomial import ReactionSpec, evaluate
from src.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_BOX = (0.0, 10.0)
DEFAULT_SAMPLES = 10_000
QUASIPOSITIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AssumptionReport:
    """
    Attributes:
        name: Which assumption was sampled
        passed: No sample violated the inequality
        worst_margin: Smallest (rhs - lhs) seen; negative means violated
        worst_point: W where the worst margin occurred
        n_samples: Points evaluated
    """

    name: str
    passed: bool
    worst_margin: float
    worst_point: np.ndarray
    n_samples: int

    def __bool__(self) -> bool:
        return self.passed


def _sample(m: int, n_samples: int, box: Tuple[float, float], seed: int) -> np.ndarray:
    lo, hi = float(box[0]), float(box[1])
    if lo < 0 or hi <= lo:
        raise InvalidInputError(f"sampling box must satisfy 0 <= lo < hi, got {box}")
    if n_samples < 1:
        raise InvalidInputError(f"n_samples must be positive, got {n_samples}")
    rng = np.random.default_rng(seed)
    points = rng.uniform(lo, hi, size=(m, n_samples))
    return np.concatenate([points, np.full((m, 1), hi)], axis=1)


def _report(name: str, margins: np.ndarray, points: np.ndarray, tol: float = 0.0) -> AssumptionReport:
    worst = int(np.argmin(margins))
    report = AssumptionReport(
        name=name,
        passed=bool(margins[worst] >= -tol),
        worst_margin=float(margins[worst]),
        worst_point=points[:, worst].copy(),
        n_samples=points.shape[1],
    )
    logger.debug(f"{name}: passed={report.passed}, worst margin {report.worst_margin:.3e}")
    return report


def check_A1(spec: ReactionSpec, n_samples: int = DEFAULT_SAMPLES, box=DEFAULT_BOX, seed: int = 0) -> AssumptionReport:
    """Quasipositivity: sample each face w_l = 0 and require F_l >= -1e-12 there."""
    margins, points = [], []
    for ell in range(spec.m):
        W = _sample(spec.m, n_samples, box, seed + ell)
        W[ell] = 0.0
        margins.append(evaluate(spec, W)[ell])
        points.append(W)
    return _report("A1 quasipositivity", np.concatenate(margins), np.concatenate(points, axis=1), QUASIPOSITIVE_TOL)


def check_A2(spec: ReactionSpec, C1: Optional[float] = None, n_samples: int = DEFAULT_SAMPLES,
             box=DEFAULT_BOX, seed: int = 0) -> AssumptionReport:
    """
    Polynomial growth with constant C1 (defaults to the coefficient bound, which always works
    on the nonnegative cone). Margins are relative to (1 + sum w)^N.
    """
    C1 = spec.coefficient_bound if C1 is None else float(C1)
    W = _sample(spec.m, n_samples, box, seed)
    scale = (1.0 + W.sum(axis=0)) ** spec.growth_degree
    margins = C1 - np.max(np.abs(evaluate(spec, W)), axis=0) / scale
    return _report("A2 polynomial growth", margins, W)


def check_A3(spec: ReactionSpec, D: Sequence[float], C2: float, n_samples: int = DEFAULT_SAMPLES,
             box=DEFAULT_BOX, seed: int = 0) -> AssumptionReport:
    """Balance inequality with weights D_1..D_{m-1} > 0 on F_1..F_{m-1} and weight 1 on F_m."""
    D = np.asarray(D, dtype=float)
    if D.shape != (spec.m - 1,):
        raise InvalidInputError(f"D must have {spec.m - 1} entries, got shape {D.shape}")
    if np.any(D <= 0):
        raise InvalidInputError(f"D entries must be positive, got {D.tolist()}")

    W = _sample(spec.m, n_samples, box, seed)
    F = evaluate(spec, W)
    lhs = D @ F[:-1] + F[-1]
    margins = C2 * (1.0 + W.sum(axis=0)) - lhs
    return _report("A3 balance", margins, W)
