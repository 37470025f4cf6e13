#!/usr/bin/env python3
"""
Positive-definiteness condition on the gradient quadratic form of L'(t).

For each exponent tuple 0 <= p_1 <= ... <= p_{m-1} <= p_m - 2 the condition matrix has entries
a_{lk} = (lbar_l + lbar_k)/2 * prod theta_j^{e_j}, e_j = p_j^2 (j < l), (p_j+1)^2 (l <= j < k),
(p_j+2)^2 (j >= k). The condition asks K_l^l > 0 for l = 2..m where the K's follow the
division-free recursion
    K_l^r = K_{r-1}^{r-1} K_l^{r-1} - (H_l^{r-1})^2
seeded by K_l^2 = a_11 a_ll - a_1l^2 and H_l^2 = a_11 a_2l - a_12 a_1l.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.lyapunov.functional import LyapunovConfig, shift_pattern
from src.utils.errors import ConditionNotSatisfied, InvalidInputError, PreconditionError

logger = logging.getLogger(__name__)

THETA_RATIO = 1.05
THETA_MAX_EXPONENT = 200
DEFAULT_BUDGET = 200_000


@dataclass(frozen=True, eq=False)
class ConditionMatrix:
    """Condition matrix materialized for one exponent tuple."""

    entries: np.ndarray
    lambda_bar: np.ndarray
    exponents: Tuple[int, ...]
    thetas: Tuple[float, ...]

    @property
    def m(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class KRecursion:
    """
    Output of the K/H recursion.

    Attributes:
        K_diag: K_l^l for l = 2..m (index 0 holds l = 2)
        K_table: K_l^r keyed by (l, r), 2 <= r <= l
        H_table: H_l^r keyed by (l, r), 2 <= r < l
        minors: Leading principal minors det[1..m], computed independently
    """

    K_diag: np.ndarray
    K_table: Dict[Tuple[int, int], float]
    H_table: Dict[Tuple[int, int], float]
    minors: np.ndarray


@dataclass(frozen=True, eq=False)
class ConditionReport:
    """Result of checking K_l^l > 0 over all exponent tuples; truthy iff satisfied."""

    satisfied: bool
    failing_tuple: Optional[Tuple[int, ...]] = None
    failing_l: Optional[int] = None
    failing_value: Optional[float] = None
    margins: List[Tuple[Tuple[int, ...], float, int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.satisfied


@dataclass(frozen=True, eq=False)
class Certificate:
    """Audit record for a certified theta vector."""

    m: int
    a: float
    b: float
    p_m: int
    thetas: Tuple[float, ...]
    margins: List[Tuple[Tuple[int, ...], float, int]]


def _require_parabolic(dec) -> None:
    if not np.all(np.asarray(dec.lambdas_bar) > 0):
        raise PreconditionError("parabolicity failed", f"smallest eigenvalue {dec.lambdas_bar[0]:.6g} <= 0")


def coupling_ratios(lambda_bar) -> np.ndarray:
    """A_{lk} = (lbar_l + lbar_k) / (2 sqrt(lbar_l lbar_k)); >= 1 with equality on the diagonal."""
    lam = np.asarray(lambda_bar, dtype=float)
    return (lam[:, None] + lam[None, :]) / (2.0 * np.sqrt(lam[:, None] * lam[None, :]))


def exponent_tuples(m: int, p_m: int) -> Iterator[Tuple[int, ...]]:
    """Nondecreasing tuples (p_1..p_{m-1}) with entries in 0..p_m-2, lexicographic order."""
    if p_m < 2:
        raise InvalidInputError(f"p_m must be >= 2, got {p_m}")
    return itertools.combinations_with_replacement(range(p_m - 1), m - 1)


def _validate_tuple(m: int, p_m: int, exponent_tuple: Sequence[int]) -> Tuple[int, ...]:
    tup = tuple(int(p) for p in exponent_tuple)
    if len(tup) != m - 1:
        raise InvalidInputError(f"exponent tuple must have {m - 1} entries, got {len(tup)}")
    bounds = (0,) + tup + (p_m - 2,)
    if any(lo > hi for lo, hi in zip(bounds, bounds[1:])):
        raise InvalidInputError(f"exponent tuple {tup} outside 0 <= p_1 <= ... <= p_(m-1) <= {p_m - 2}")
    return tup


def _log_entries(lam: np.ndarray, thetas: Sequence[float], tup: Tuple[int, ...]) -> np.ndarray:
    """Logarithms of the condition-matrix entries; every entry is positive."""
    m = len(lam)
    log_theta = np.log(np.asarray(thetas, dtype=float))
    p = np.asarray(tup, dtype=float)
    out = np.empty((m, m))
    for ell in range(1, m + 1):
        for kappa in range(ell, m + 1):
            exponents = (p + shift_pattern(m, ell, kappa)) ** 2
            value = np.log(0.5 * (lam[ell - 1] + lam[kappa - 1])) + float(exponents @ log_theta)
            out[ell - 1, kappa - 1] = value
            out[kappa - 1, ell - 1] = value
    return out


def build_condition_matrix(dec, cfg: LyapunovConfig, exponent_tuple: Sequence[int]) -> ConditionMatrix:
    """
    Materialize the condition matrix for one exponent tuple.

    Args:
        dec: Anything exposing m and ascending lambdas_bar
        cfg: Lyapunov configuration (p_m, thetas)
        exponent_tuple: (p_1, ..., p_{m-1})
    """
    _require_parabolic(dec)
    m = dec.m
    if cfg.m != m:
        raise InvalidInputError(f"config has m={cfg.m}, decomposition has m={m}")
    tup = _validate_tuple(m, cfg.p_m, exponent_tuple)
    lam = np.asarray(dec.lambdas_bar, dtype=float)
    entries = np.exp(_log_entries(lam, cfg.thetas, tup))
    return ConditionMatrix(entries=entries, lambda_bar=lam, exponents=tup, thetas=tuple(cfg.thetas))


def _entries(mat) -> np.ndarray:
    arr = mat.entries if isinstance(mat, ConditionMatrix) else np.asarray(mat, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 2:
        raise InvalidInputError(f"need a square matrix of size >= 2, got shape {arr.shape}")
    return arr


def k_recursion(mat) -> KRecursion:
    """
    Run the K/H recursion on a symmetric matrix.

    Level r keeps the bordered quantities G^r(i, j) = a_11-style Sylvester updates;
    K_l^r = G^r(l, l) and H_l^r = G^r(r, l). Level r+1 is
    G^{r+1}(i, j) = G^r(r, r) G^r(i, j) - G^r(i, r) G^r(r, j).
    """
    M = _entries(mat)
    m = M.shape[0]

    G = M[0, 0] * M - np.outer(M[0], M[0])
    K_table = {(l, 2): float(G[l - 1, l - 1]) for l in range(2, m + 1)}
    H_table = {}
    for r in range(2, m):
        pivot = G[r - 1, r - 1]
        for l in range(r + 1, m + 1):
            H_table[(l, r)] = float(G[r - 1, l - 1])
        G = pivot * G - np.outer(G[:, r - 1], G[r - 1, :])
        for l in range(r + 1, m + 1):
            K_table[(l, r + 1)] = float(G[l - 1, l - 1])

    K_diag = np.array([K_table[(l, l)] for l in range(2, m + 1)])
    minors = np.array([np.linalg.det(M[:k, :k]) for k in range(1, m + 1)])
    return KRecursion(K_diag=K_diag, K_table=K_table, H_table=H_table, minors=minors)


def minor_product(minors: Sequence[float], r: int) -> float:
    """prod_{k=1}^{r-2} det[k]^{2^{r-k-2}}."""
    out = 1.0
    for k in range(1, r - 1):
        out *= minors[k - 1] ** (2 ** (r - k - 2))
    return out


def h_from_minors(mat, l: int, r: int) -> float:
    """
    H_l^r from its determinant definition: rows 1..r, columns 1..r-1 and l of the matrix,
    times prod det[k]^{2^{r-k-2}}.
    """
    M = _entries(mat)
    m = M.shape[0]
    if not 2 <= r < l <= m:
        raise InvalidInputError(f"need 2 <= r < l <= {m}, got r={r}, l={l}")
    cols = list(range(r - 1)) + [l - 1]
    sub = M[np.ix_(range(r), cols)]
    minors = [np.linalg.det(M[:k, :k]) for k in range(1, r)]
    return float(np.linalg.det(sub) * minor_product(minors, r))


def factored_seed_forms(dec, cfg: LyapunovConfig, exponent_tuple: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pre-factored K_l^2 (l = 2..m) and H_l^2 (l = 3..m) written with the ratios A_{lk}.

    K_l^2 = lbar_1 lbar_l prod_{k<l} theta_k^{2(p_k+1)^2} prod_{k>=l} theta_k^{2(p_k+2)^2}
            * [prod_{k<l} theta_k^2 - A_{1l}^2]
    H_l^2 = lbar_1 sqrt(lbar_2 lbar_l) theta_1^{2(p_1+1)^2} prod_{2<=k<l} theta_k^{(p_k+2)^2+(p_k+1)^2}
            prod_{k>=l} theta_k^{2(p_k+2)^2} * [theta_1^2 A_{2l} - A_{12} A_{1l}]
    """
    m = dec.m
    tup = _validate_tuple(m, cfg.p_m, exponent_tuple)
    lam = np.asarray(dec.lambdas_bar, dtype=float)
    A = coupling_ratios(lam)
    th = np.asarray(cfg.thetas, dtype=float)
    p = np.asarray(tup, dtype=float)

    K = np.empty(m - 1)
    for l in range(2, m + 1):
        low, high = slice(0, l - 1), slice(l - 1, m - 1)
        scale = lam[0] * lam[l - 1] * np.prod(th[low] ** (2 * (p[low] + 1) ** 2)) \
            * np.prod(th[high] ** (2 * (p[high] + 2) ** 2))
        K[l - 2] = scale * (np.prod(th[low] ** 2) - A[0, l - 1] ** 2)

    H = np.empty(max(m - 2, 0))
    for l in range(3, m + 1):
        mid, high = slice(1, l - 1), slice(l - 1, m - 1)
        scale = lam[0] * np.sqrt(lam[1] * lam[l - 1]) * th[0] ** (2 * (p[0] + 1) ** 2) \
            * np.prod(th[mid] ** ((p[mid] + 2) ** 2 + (p[mid] + 1) ** 2)) \
            * np.prod(th[high] ** (2 * (p[high] + 2) ** 2))
        H[l - 3] = scale * (th[0] ** 2 * A[1, l - 1] - A[0, 1] * A[0, l - 1])
    return K, H


def _unit_diagonal_k(log_entries: np.ndarray) -> np.ndarray:
    """
    K_l^l of the congruent matrix D M D with D = diag(M)^{-1/2}.

    Each K_l^l is a product of leading minors and a positive diagonal congruence scales every
    leading minor by a positive factor, so the signs are those of M. Starting from logarithms
    keeps the unit-diagonal entries representable for any theta.
    """
    half = 0.5 * np.diag(log_entries)
    return k_recursion(np.exp(log_entries - half[:, None] - half[None, :])).K_diag


def check_condition(dec, cfg: LyapunovConfig) -> ConditionReport:
    """
    Check K_l^l > 0 for l = 2..m over every exponent tuple, failing fast in lexicographic order.

    Margins are K_l^l of the unit-diagonal congruent form of each condition matrix.
    """
    _require_parabolic(dec)
    if cfg.m != dec.m:
        raise InvalidInputError(f"config has m={cfg.m}, decomposition has m={dec.m}")

    lam = np.asarray(dec.lambdas_bar, dtype=float)
    margins = []
    for tup in exponent_tuples(dec.m, cfg.p_m):
        K = _unit_diagonal_k(_log_entries(lam, cfg.thetas, _validate_tuple(dec.m, cfg.p_m, tup)))
        worst = int(np.argmin(K))
        if not K[worst] > 0:
            logger.info(f"Condition fails at tuple {tup}, l={worst + 2}: K={K[worst]:.6g}")
            return ConditionReport(
                satisfied=False,
                failing_tuple=tup,
                failing_l=worst + 2,
                failing_value=float(K[worst]),
                margins=margins,
            )
        margins.append((tup, float(K[worst]), worst + 2))
    return ConditionReport(satisfied=True, margins=margins)


def normalized_condition_matrix(lambda_bar, thetas: Sequence[float]) -> np.ndarray:
    """
    Unit-diagonal congruent form of every condition matrix: B_{lk} = A_{lk} / prod_{j=l}^{k-1} theta_j.

    It does not depend on the exponent tuple, so one Cholesky screens all tuples at once.
    """
    A = coupling_ratios(lambda_bar)
    log_theta = np.concatenate(([0.0], np.cumsum(np.log(np.asarray(thetas, dtype=float)))))
    gap = np.abs(log_theta[:, None] - log_theta[None, :])
    return A * np.exp(-gap)


def _compositions(total: int, parts: int, cap: int) -> Iterator[Tuple[int, ...]]:
    """Tuples of `parts` integers in 0..cap summing to total, lexicographic order."""
    if parts == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(max(0, total - cap * (parts - 1)), min(cap, total) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


def _screen(lambda_bar, thetas) -> Tuple[bool, float]:
    B = normalized_condition_matrix(lambda_bar, thetas)
    margin = min(np.linalg.det(B[:k, :k]) for k in range(2, B.shape[0] + 1))
    try:
        np.linalg.cholesky(B)
        return True, float(margin)
    except np.linalg.LinAlgError:
        return False, float(margin)


def theta_search(dec, p_m: int, budget: int = DEFAULT_BUDGET, ratio: float = THETA_RATIO,
                 max_exponent: int = THETA_MAX_EXPONENT) -> LyapunovConfig:
    """
    Deterministic grid search theta_l = ratio^j_l, j_l in 0..max_exponent.

    Candidates are visited by increasing sum of exponents (smallest theta product first), then
    lexicographically. A candidate that passes the normalized screen is confirmed with
    check_condition before being returned.

    Raises:
        ConditionNotSatisfied: budget exhausted; carries the tightest margin found
    """
    if p_m < 2:
        raise InvalidInputError(f"p_m must be >= 2, got {p_m}")
    _require_parabolic(dec)
    dims = dec.m - 1
    best_margin, best_thetas = float("-inf"), None
    screened = 0

    for total in range(dims * max_exponent + 1):
        for exponents in _compositions(total, dims, max_exponent):
            if screened >= budget:
                raise ConditionNotSatisfied(
                    f"theta search exhausted its budget of {budget} candidates",
                    tightest_margin=best_margin,
                    best_thetas=best_thetas,
                )
            screened += 1
            thetas = tuple(float(ratio ** j) for j in exponents)
            passed, margin = _screen(dec.lambdas_bar, thetas)
            if margin > best_margin:
                best_margin, best_thetas = margin, thetas
            if not passed:
                continue
            cfg = LyapunovConfig(p_m=p_m, thetas=thetas)
            if check_condition(dec, cfg):
                logger.info(f"Certified thetas {thetas} after {screened} candidates")
                return cfg
            logger.warning(f"Screen accepted {thetas} but the tuple-wise check did not")

    raise ConditionNotSatisfied(
        "theta grid exhausted without a certificate",
        tightest_margin=best_margin,
        best_thetas=best_thetas,
    )


def make_certificate(sys, dec, cfg: LyapunovConfig) -> Certificate:
    """Check the condition for cfg and package the per-tuple margins for audit."""
    report = check_condition(dec, cfg)
    if not report:
        raise ConditionNotSatisfied(
            f"condition fails at tuple {report.failing_tuple}, l={report.failing_l}",
            tightest_margin=report.failing_value,
            best_thetas=cfg.thetas,
        )
    return Certificate(m=sys.m, a=sys.a, b=sys.b, p_m=cfg.p_m, thetas=tuple(cfg.thetas), margins=report.margins)


def format_certificate(cert: Certificate) -> str:
    lines = [
        "# Lyapunov condition certificate",
        f"m = {cert.m}",
        f"a = {cert.a!r}",
        f"b = {cert.b!r}",
        f"p_m = {cert.p_m}",
        "theta = " + ", ".join(f"{t:.12g}" for t in cert.thetas),
        f"tuples = {len(cert.margins)}",
        "# tuple : min K_l^l (rescaled) @ l",
    ]
    for tup, margin, l in cert.margins:
        lines.append(f"{' '.join(str(p) for p in tup)} : {margin:.6e} @ {l}")
    return "\n".join(lines) + "\n"


def write_certificate(cert: Certificate, path: str) -> str:
    with open(path, 'w', encoding='utf-8') as f:
        f.write(format_certificate(cert))
    logger.info(f"Wrote certificate to {path}")
    return path
