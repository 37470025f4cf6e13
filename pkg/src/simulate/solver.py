#!/usr/bin/env python3
"""
Method-of-lines solver for the diagonalized system in a region's signed coordinates.

Each component obeys d_t w_l = lbar_l d_xx w_l + F_l(W). One step is a Strang splitting:
half a reaction step (classical RK4 at every node), a Crank-Nicolson diffusion step per
component, then another half reaction step. Component w_l diffuses with lbar_l, the
eigenvalue carried by row l of the sine matrix.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import solve_banded

from src.lyapunov.condition import check_condition
from src.lyapunov.functional import LyapunovConfig
from src.reactions.polynomial import ReactionSpec, evaluate
from src.regions.invariant_regions import RegionSpec, boundary_compat, signed_transform
from src.simulate.mesh import BoundarySpec, Mesh1D, sup_norm, trapezoid_mean
from src.simulate.monitors import GronwallFit, corollary_ratio, fit_gronwall, lp_mass, lyapunov_functional
from src.spectral.toeplitz import ToeplitzSystem, decompose
from src.utils.errors import InvalidInputError, PreconditionError

logger = logging.getLogger(__name__)

BLOWUP_THRESHOLD = 1e6
MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Everything one run needs, already validated at the type level."""

    system: ToeplitzSystem
    region: RegionSpec
    reaction: ReactionSpec
    lyapunov: LyapunovConfig
    mesh: Mesh1D
    boundary: BoundarySpec
    U0: np.ndarray
    T_final: float
    dt: Optional[float] = None
    sample_every: int = 1
    blowup_threshold: float = BLOWUP_THRESHOLD
    membership_tol: float = MEMBERSHIP_TOL


@dataclass(frozen=True, eq=False)
class SimState:
    """
    Solution at time t. W holds the signed region coordinates (m x n_nodes); U is derived.
    """

    t: float
    W: np.ndarray
    transform: object
    mesh: Mesh1D
    blow_up: bool = False

    @property
    def U(self) -> np.ndarray:
        return self.transform.to_u(self.W)

    @classmethod
    def from_u(cls, U, transform, mesh: Mesh1D, t: float = 0.0) -> "SimState":
        U = np.asarray(U, dtype=float)
        if U.shape != (transform.m, mesh.n_nodes):
            raise InvalidInputError(f"U must have shape {(transform.m, mesh.n_nodes)}, got {U.shape}")
        return cls(t=t, W=transform.to_w(U), transform=transform, mesh=mesh)

    @property
    def supnorm(self) -> float:
        """sum_l max_x |w_l|; NaN propagates so blow-up checks see it."""
        return float(np.sum(sup_norm(self.W)))


def rk4(rhs, W: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(W)
    k2 = rhs(W + 0.5 * dt * k1)
    k3 = rhs(W + 0.5 * dt * k2)
    k4 = rhs(W + dt * k3)
    return W + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def laplacian_bands(n_nodes: int, h: float, sigma: float):
    """
    Lower, main and upper coefficients of the ghost-node Laplacian with d_eta w = gamma - sigma w.

    Eliminating w_{-1} = w_1 + 2h (gamma - sigma w_0) gives row 0 as
    (2 w_1 - (2 + 2 h sigma) w_0) / h^2 + 2 gamma / h, and symmetrically at the right end.
    """
    inv_h2 = 1.0 / h ** 2
    lower = np.full(n_nodes, inv_h2)
    main = np.full(n_nodes, -2.0 * inv_h2)
    upper = np.full(n_nodes, inv_h2)
    lower[0] = upper[-1] = 0.0
    upper[0] = lower[-1] = 2.0 * inv_h2
    main[0] = main[-1] = -(2.0 + 2.0 * h * sigma) * inv_h2
    return lower, main, upper


def _apply_bands(lower, main, upper, w):
    out = main * w
    out[1:] += lower[1:] * w[:-1]
    out[:-1] += upper[:-1] * w[1:]
    return out


class SplitStepper:
    """
    Precomputed Strang step for a fixed (transform, reaction, mesh, boundary, dt).

    Args:
        transform: SignedTransform or SpectralDecomposition
        reaction: Reaction in the same coordinates
        mesh: Spatial mesh
        boundary: Per-component boundary kinds
        dt: Time step
        diffusivities: Override of lambdas_bar, for negative controls only
        blowup_threshold: Sup-norm above which a step flags blow-up
    """

    def __init__(self, transform, reaction: ReactionSpec, mesh: Mesh1D, boundary: BoundarySpec, dt: float,
                 diffusivities: Optional[Sequence[float]] = None, blowup_threshold: float = BLOWUP_THRESHOLD):
        if dt <= 0:
            raise InvalidInputError(f"dt must be positive, got {dt}")
        if not (reaction.m == boundary.m == transform.m):
            raise InvalidInputError("reaction, boundary and transform disagree on m")

        self.transform = transform
        self.reaction = reaction
        self.mesh = mesh
        self.dt = dt
        self.blowup_threshold = blowup_threshold
        self.dirichlet = boundary.dirichlet
        self.diffusivities = np.asarray(
            transform.lambdas_bar if diffusivities is None else diffusivities, dtype=float
        )
        if np.any(self.diffusivities <= 0):
            raise PreconditionError("parabolicity failed", f"diffusivities {self.diffusivities.tolist()}")

        sigma, gamma = boundary.w_coefficients(transform)
        n, h = mesh.n_nodes, mesh.h
        self._bands, self._lhs, self._forcing = [], [], []
        for ell in range(transform.m):
            kappa = 0.5 * dt * self.diffusivities[ell]
            lower, main, upper = laplacian_bands(n, h, sigma[ell])
            ab = np.zeros((3, n))
            ab[0, 1:] = -kappa * upper[:-1]
            ab[1] = 1.0 - kappa * main
            ab[2, :-1] = -kappa * lower[1:]
            forcing = np.zeros(n)
            forcing[[0, -1]] = 2.0 * kappa * 2.0 * gamma[ell] / h
            if self.dirichlet[ell]:
                ab[1, 0] = ab[1, -1] = 1.0
                ab[0, 1] = ab[2, -2] = 0.0
            self._bands.append((kappa * lower, kappa * main, kappa * upper))
            self._lhs.append(ab)
            self._forcing.append(forcing)

    def _impose_dirichlet(self, W: np.ndarray) -> np.ndarray:
        if np.any(self.dirichlet):
            W[self.dirichlet, 0] = 0.0
            W[self.dirichlet, -1] = 0.0
        return W

    def react(self, W: np.ndarray, dt: float) -> np.ndarray:
        return self._impose_dirichlet(rk4(lambda X: evaluate(self.reaction, X), W, dt))

    def diffuse(self, W: np.ndarray) -> np.ndarray:
        out = np.empty_like(W)
        for ell in range(W.shape[0]):
            rhs = W[ell] + _apply_bands(*self._bands[ell], W[ell]) + self._forcing[ell]
            if self.dirichlet[ell]:
                rhs[[0, -1]] = 0.0
            out[ell] = solve_banded((1, 1), self._lhs[ell], rhs, check_finite=False)
        return out

    def __call__(self, state: SimState) -> SimState:
        with np.errstate(over='ignore', invalid='ignore'):
            W = self.react(state.W.copy(), 0.5 * self.dt)
            W = self.diffuse(W)
            W = self.react(W, 0.5 * self.dt)
        stepped = replace(state, t=state.t + self.dt, W=W)
        sup = stepped.supnorm
        if not state.blow_up and (not np.isfinite(sup) or sup > self.blowup_threshold):
            logger.debug(f"Step to t={stepped.t:.6g} left sup-norm {sup:.3e}")
            stepped = replace(stepped, blow_up=True)
        return stepped


def step(state: SimState, sys: ToeplitzSystem, dec, reactions: ReactionSpec, bc: BoundarySpec,
         dt: float, blowup_threshold: float = BLOWUP_THRESHOLD) -> SimState:
    """
    One Strang step. dec is the transform the state's W is expressed in.

    Non-finite values or a sup-norm above blowup_threshold set blow_up on the returned state;
    the flag stays set on later steps.
    """
    if not sys.parabolic:
        raise PreconditionError("parabolicity failed")
    return SplitStepper(dec, reactions, state.mesh, bc, dt, blowup_threshold=blowup_threshold)(state)


@dataclass(eq=False)
class SimResult:
    """
    Per-step monitor series of one run. Row i of minw / mass belongs to t[i].

    Attributes:
        blow_up: Sup-norm crossed the threshold or went non-finite
        t_max: First offending time when blow_up, else None
        gronwall: Fitted (C6, C8) pair over the finite part of Z
        corollary: max_t mean((sum w)^{p_m}) / L(t)
    """

    m: int
    p_m: int
    sample_every: int
    t: np.ndarray
    L: np.ndarray
    Z: np.ndarray
    supnorm: np.ndarray
    minw: np.ndarray
    mass: np.ndarray
    blow_up: bool
    t_max: Optional[float]
    gronwall: GronwallFit
    corollary: float
    final_state: SimState = field(repr=False)

    @property
    def min_signed(self) -> float:
        return float(np.nanmin(self.minw))

    def to_frame(self) -> pd.DataFrame:
        """One row every sample_every steps, the last step always included."""
        rows = list(range(0, len(self.t), self.sample_every))
        if rows[-1] != len(self.t) - 1:
            rows.append(len(self.t) - 1)
        data = {'t': self.t[rows], 'L': self.L[rows], 'Z': self.Z[rows], 'supnorm': self.supnorm[rows]}
        for ell in range(self.m):
            data[f'minw_{ell + 1}'] = self.minw[rows, ell]
        for ell in range(self.m):
            data[f'mass_{ell + 1}'] = self.mass[rows, ell]
        return pd.DataFrame(data)

    def write_csv(self, path: str) -> str:
        self.to_frame().to_csv(path, index=False, float_format='%.12e')
        logger.info(f"Wrote {path}")
        return path


def validate_preconditions(config: SimConfig, check_lyapunov: bool = True):
    """
    Check everything a run assumes and return the region's signed transform.

    Raises:
        PreconditionError: with reason "parabolicity failed", "region membership failed",
            "boundary compatibility failed" or "lyapunov condition failed"
        InvalidInputError: inconsistent dimensions or boundary data
    """
    sys = config.system
    m = sys.m
    for name, other in (("region", config.region.m), ("reaction", config.reaction.m),
                        ("boundary", config.boundary.m), ("lyapunov", config.lyapunov.m)):
        if other != m:
            raise InvalidInputError(f"{name} has m={other}, system has m={m}")
    if config.T_final <= 0:
        raise InvalidInputError(f"T_final must be positive, got {config.T_final}")
    if config.sample_every < 1:
        raise InvalidInputError(f"sample_every must be >= 1, got {config.sample_every}")
    U0 = np.asarray(config.U0, dtype=float)
    if U0.shape != (m, config.mesh.n_nodes):
        raise InvalidInputError(f"U0 must have shape {(m, config.mesh.n_nodes)}, got {U0.shape}")

    if not sys.parabolic:
        raise PreconditionError("parabolicity failed", f"2b cos(pi/(m+1)) >= a for m={m}, a={sys.a}, b={sys.b}")
    dec = decompose(sys)
    transform = signed_transform(config.region, dec)

    margins = transform.to_w(U0)
    if np.min(margins) < -config.membership_tol:
        comp, node = np.unravel_index(np.argmin(margins), margins.shape)
        raise PreconditionError(
            "region membership failed",
            f"{config.region.label()}: signed w_{comp + 1} = {margins[comp, node]:.3e} at x = {config.mesh.nodes[node]:.4g}",
        )
    compat = boundary_compat(config.region, dec, config.boundary.beta, config.membership_tol)
    if not compat:
        raise PreconditionError("boundary compatibility failed", f"signed rho = {compat.margins.tolist()}")
    config.boundary.w_coefficients(transform)

    if check_lyapunov:
        report = check_condition(dec, config.lyapunov)
        if not report:
            raise PreconditionError(
                "lyapunov condition failed",
                f"K_{report.failing_l}^{report.failing_l} = {report.failing_value:.3e} at tuple {report.failing_tuple}",
            )
    return transform


def time_grid(T_final: float, dt: Optional[float], mesh: Mesh1D):
    """Number of steps and the uniform dt that lands exactly on T_final (dt defaults to h)."""
    target = mesh.h if dt is None else dt
    if target <= 0:
        raise InvalidInputError(f"dt must be positive, got {target}")
    n_steps = max(1, math.ceil(T_final / target - 1e-9))
    return n_steps, T_final / n_steps


class _Recorder:
    def __init__(self, cfg: LyapunovConfig, mesh: Mesh1D):
        self.cfg, self.mesh = cfg, mesh
        self.t, self.L, self.lp, self.supnorm, self.minw, self.mass = [], [], [], [], [], []

    def record(self, state: SimState):
        with np.errstate(over='ignore', invalid='ignore'):
            self.t.append(state.t)
            self.L.append(lyapunov_functional(state.W, self.cfg, self.mesh))
            self.lp.append(lp_mass(state.W, self.cfg.p_m, self.mesh))
            self.supnorm.append(state.supnorm)
            self.minw.append(np.min(state.W, axis=1))
            self.mass.append(trapezoid_mean(state.U, self.mesh))


def run(config: SimConfig, check_lyapunov: bool = True) -> SimResult:
    """
    Integrate to T_final or until blow-up, recording monitors after every step.

    Preconditions are checked first (see validate_preconditions).
    """
    transform = validate_preconditions(config, check_lyapunov=check_lyapunov)
    n_steps, dt = time_grid(config.T_final, config.dt, config.mesh)
    stepper = SplitStepper(transform, config.reaction, config.mesh, config.boundary, dt,
                           blowup_threshold=config.blowup_threshold)
    state = SimState.from_u(config.U0, transform, config.mesh)
    recorder = _Recorder(config.lyapunov, config.mesh)
    recorder.record(state)

    logger.info(f"Running m={config.system.m}, {n_steps} steps of dt={dt:.4g} on {config.mesh.n_nodes} nodes")
    t_max = None
    for _ in range(n_steps):
        state = stepper(state)
        recorder.record(state)
        if state.blow_up:
            sup = recorder.supnorm[-1]
            t_max = state.t
            logger.warning(f"Blow-up detected at t={t_max:.6g} (sup-norm {sup:.3e})")
            break

    t = np.asarray(recorder.t)
    L = np.asarray(recorder.L)
    with np.errstate(invalid='ignore', over='ignore'):
        Z = np.power(np.clip(L, 0.0, None), 1.0 / config.lyapunov.p_m)
    gronwall = fit_gronwall(t, Z, config.lyapunov.p_m)
    result = SimResult(
        m=config.system.m,
        p_m=config.lyapunov.p_m,
        sample_every=config.sample_every,
        t=t,
        L=L,
        Z=Z,
        supnorm=np.asarray(recorder.supnorm),
        minw=np.vstack(recorder.minw),
        mass=np.vstack(recorder.mass),
        blow_up=state.blow_up,
        t_max=t_max,
        gronwall=gronwall,
        corollary=corollary_ratio(recorder.lp, L),
        final_state=state,
    )
    logger.info(
        f"Run finished at t={state.t:.6g}: min signed w {result.min_signed:.3e}, "
        f"C6={gronwall.C6:.4g}, C8={gronwall.C8:.4g}"
    )
    return result
