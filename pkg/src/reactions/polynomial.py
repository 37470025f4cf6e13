#!/usr/bin/env python3
"""
Polynomial reaction terms F(W) written in the transformed coordinates w_1..w_m.

Each component F_l is a list of monomials (coefficient, exponent multi-index). A plain-text
file format holds one monomial per line:

    # component coefficient e1 e2 ... em
    1 -1.0 1 1
    2  1.0 1 1

Components are 1-based.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

Monomial = Tuple[float, Tuple[int, ...]]


@dataclass(frozen=True)
class ReactionSpec:
    """
    Vector-valued polynomial map on the nonnegative cone.

    Attributes:
        m: Component count
        terms: terms[l] is the monomial list of F_{l+1}
        growth_degree: N with N >= every monomial's total degree
    """

    m: int
    terms: Tuple[Tuple[Monomial, ...], ...]
    growth_degree: int

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError(f"m must be positive, got {self.m}")
        if len(self.terms) != self.m:
            raise InvalidInputError(f"expected {self.m} components, got {len(self.terms)}")
        for component, monomials in enumerate(self.terms, start=1):
            for coef, exps in monomials:
                if len(exps) != self.m:
                    raise InvalidInputError(f"F_{component}: exponent tuple {exps} must have {self.m} entries")
                if any(int(e) != e or e < 0 for e in exps):
                    raise InvalidInputError(f"F_{component}: exponents must be nonnegative integers, got {exps}")
                if not np.isfinite(coef):
                    raise InvalidInputError(f"F_{component}: non-finite coefficient {coef}")
        if self.growth_degree < self.max_degree:
            raise InvalidInputError(f"growth degree {self.growth_degree} below total degree {self.max_degree}")

    @property
    def max_degree(self) -> int:
        degrees = [sum(exps) for monomials in self.terms for _, exps in monomials]
        return max(degrees, default=0)

    @property
    def coefficient_bound(self) -> float:
        """Largest per-component sum of |coefficients|."""
        return max((sum(abs(c) for c, _ in monomials) for monomials in self.terms), default=0.0)

    @classmethod
    def from_monomials(cls, m: int, entries: Iterable[Tuple[int, float, Sequence[int]]],
                       growth_degree: Optional[int] = None) -> "ReactionSpec":
        """Build from (component, coefficient, exponents) triples with 1-based components."""
        buckets: List[List[Monomial]] = [[] for _ in range(m)]
        for component, coef, exps in entries:
            if not 1 <= component <= m:
                raise InvalidInputError(f"component {component} outside 1..{m}")
            buckets[component - 1].append((float(coef), tuple(int(e) for e in exps)))
        degree = max((sum(e) for bucket in buckets for _, e in bucket), default=0)
        return cls(
            m=m,
            terms=tuple(tuple(bucket) for bucket in buckets),
            growth_degree=degree if growth_degree is None else growth_degree,
        )


def zero_reaction(m: int) -> ReactionSpec:
    return ReactionSpec(m=m, terms=tuple(() for _ in range(m)), growth_degree=0)


def builtin_family(m: int, q: int) -> ReactionSpec:
    """
    F_l = -w_l w_m^q for l < m and F_m = (w_1 + ... + w_{m-1}) w_m^q.

    Quasipositive, of polynomial growth q+1, and sum_{l<m} D_l F_l + F_m <= 0 whenever every D_l >= 1.
    """
    if m < 2:
        raise InvalidInputError(f"m must be >= 2, got {m}")
    if q < 1:
        raise InvalidInputError(f"q must be >= 1, got {q}")

    entries = []
    for ell in range(1, m):
        exps = [0] * m
        exps[ell - 1] = 1
        exps[m - 1] = q
        entries.append((ell, -1.0, exps))
        entries.append((m, 1.0, exps))
    return ReactionSpec.from_monomials(m, entries, growth_degree=q + 1)


def _component_arrays(spec: ReactionSpec):
    arrays = []
    for monomials in spec.terms:
        coefs = np.array([c for c, _ in monomials], dtype=float)
        exps = np.array([e for _, e in monomials], dtype=float).reshape(len(monomials), spec.m)
        arrays.append((coefs, exps))
    return arrays


def evaluate(spec: ReactionSpec, W) -> np.ndarray:
    """F(W) for an m-vector or an m x N array of nodal values."""
    arr = np.asarray(W, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] != spec.m:
        raise InvalidInputError(f"W must have leading dimension {spec.m}, got shape {np.shape(W)}")

    out = np.zeros_like(arr)
    for ell, (coefs, exps) in enumerate(_component_arrays(spec)):
        if coefs.size == 0:
            continue
        monomials = np.prod(np.power(arr[None, :, :], exps[:, :, None]), axis=1)
        out[ell] = coefs @ monomials
    return out[:, 0] if single else out


def pullback_to_u(spec: ReactionSpec, dec) -> Callable[[np.ndarray], np.ndarray]:
    """
    u-space reaction f = V^-1 F(V U), evaluated nodewise.

    dec may be a SpectralDecomposition or a region's SignedTransform; only V and V_inv are used.
    """
    if spec.m != dec.m:
        raise InvalidInputError(f"reaction has m={spec.m}, transform has m={dec.m}")
    V, V_inv = np.asarray(dec.V), np.asarray(dec.V_inv)

    def f(U):
        return V_inv @ evaluate(spec, V @ np.asarray(U, dtype=float))

    return f


def load_reaction_file(path: str, m: int) -> ReactionSpec:
    """Parse the monomial file format; blank lines and '#' comments are skipped."""
    entries = []
    try:
        with open(path, 'r', encoding='utf-8') as f:
            lines = f.readlines()
    except OSError as e:
        raise InvalidInputError(f"cannot read reaction file {path}: {e}") from e

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != m + 2:
            raise InvalidInputError(f"{path}:{lineno}: expected {m + 2} fields, got {len(fields)}")
        try:
            component = int(fields[0])
            coef = float(fields[1])
            exps = [int(x) for x in fields[2:]]
        except ValueError as e:
            raise InvalidInputError(f"{path}:{lineno}: {e}") from e
        entries.append((component, coef, exps))

    spec = ReactionSpec.from_monomials(m, entries)
    logger.info(f"Loaded {len(entries)} monomials from {path} (degree {spec.growth_degree})")
    return spec


def dump_reaction_file(spec: ReactionSpec, path: str) -> str:
    lines = [f"# component coefficient e1..e{spec.m}"]
    for component, monomials in enumerate(spec.terms, start=1):
        for coef, exps in monomials:
            lines.append(f"{component} {coef!r} " + " ".join(str(e) for e in exps))
    with open(path, 'w', encoding='utf-8') as f:
        f.write("\n".join(lines) + "\n")
    return path
