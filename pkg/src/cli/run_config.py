#!/usr/bin/env python3
"""
Run configuration files.

Line-based `key = value` with dotted sections and `#` comments; list values are comma separated:

    sys.m = 2
    bc.kind = neumann
    region.L = 1, 2
    reaction.builtin_q = 1
    lyapunov.theta = auto

Unknown sections or keys are rejected.
"""

import logging
import os
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.lyapunov.condition import theta_search
from src.lyapunov.functional import LyapunovConfig
from src.reactions.assumptions import AssumptionReport, check_A1, check_A3
from src.reactions.polynomial import ReactionSpec, builtin_family, load_reaction_file
from src.regions.invariant_regions import RegionSpec
from src.simulate.mesh import BoundarySpec, Mesh1D, initial_field
from src.simulate.solver import SimConfig
from src.spectral.toeplitz import SpectralDecomposition, ToeplitzSystem, decompose
from src.utils.errors import InvalidInputError
from src.utils.settings import Settings

logger = logging.getLogger(__name__)


def _listify(value):
    if value is None or isinstance(value, (list, tuple)):
        return value
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    return [value]


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')


class SystemSection(_Section):
    m: int = Field(ge=2)
    a: float = Field(gt=0)
    b: float = Field(gt=0)


class BoundarySection(_Section):
    kind: Tuple[str, ...] = ('neumann',)
    alpha: Tuple[float, ...] = ()
    beta: Tuple[float, ...] = ()

    @field_validator('kind', 'alpha', 'beta', mode='before')
    @classmethod
    def split_lists(cls, value):
        return _listify(value)


class RegionSection(_Section):
    L: Tuple[int, ...] = ()

    @field_validator('L', mode='before')
    @classmethod
    def split_lists(cls, value):
        return _listify(value)


class ReactionSection(_Section):
    builtin_q: Optional[int] = Field(default=None, ge=1)
    file: Optional[str] = None
    D: Tuple[float, ...] = ()
    C2: float = Field(default=1.0, ge=0)

    @field_validator('D', mode='before')
    @classmethod
    def split_lists(cls, value):
        return _listify(value)

    @field_validator('D')
    @classmethod
    def positive_weights(cls, value):
        if any(d <= 0 for d in value):
            raise ValueError(f"reaction.D entries must be positive, got {list(value)}")
        return value

    @model_validator(mode='after')
    def one_source(self):
        if (self.builtin_q is None) == (self.file is None):
            raise ValueError("give exactly one of reaction.builtin_q and reaction.file")
        return self


class LyapunovSection(_Section):
    p_m: int = Field(default=2, ge=2)
    theta: Union[Literal['auto'], Tuple[float, ...]] = 'auto'

    @field_validator('theta', mode='before')
    @classmethod
    def parse_theta(cls, value):
        if isinstance(value, str) and value.strip().lower() == 'auto':
            return 'auto'
        return _listify(value)


class MeshSection(_Section):
    X: float = Field(default=float(np.pi), gt=0)
    n_cells: int = Field(default=64, ge=8)


class TimeSection(_Section):
    T_final: float = Field(default=1.0, gt=0)
    dt: Optional[float] = Field(default=None, gt=0)
    sample_every: int = Field(default=1, ge=1)


class InitSection(_Section):
    u0: Tuple[float, ...]
    profile: Literal['constant', 'cosine', 'sine'] = 'constant'
    amplitude: float = Field(default=0.5, ge=0, le=1)
    noise: float = Field(default=0.0, ge=0)

    @field_validator('u0', mode='before')
    @classmethod
    def split_lists(cls, value):
        return _listify(value)


class RunConfig(BaseModel):
    """A parsed run configuration; build() turns it into the simulator's SimConfig."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    sys: SystemSection
    bc: BoundarySection = BoundarySection()
    region: RegionSection = RegionSection()
    reaction: ReactionSection
    lyapunov: LyapunovSection = LyapunovSection()
    mesh: MeshSection = MeshSection()
    time: TimeSection = TimeSection()
    init: InitSection
    seed: int = 0
    base_dir: str = '.'

    @model_validator(mode='after')
    def balance_weights_match_m(self):
        if self.reaction.D and len(self.reaction.D) != self.sys.m - 1:
            m = self.sys.m
            raise ValueError(f"reaction.D needs {m - 1} entries for m={m}, got {len(self.reaction.D)}")
        return self

    def toeplitz(self) -> ToeplitzSystem:
        return ToeplitzSystem(m=self.sys.m, a=self.sys.a, b=self.sys.b)

    def region_spec(self) -> RegionSpec:
        L = self.region.L if self.region.L else range(1, self.sys.m + 1)
        return RegionSpec.from_L(self.sys.m, L)

    def reaction_spec(self) -> ReactionSpec:
        if self.reaction.builtin_q is not None:
            return builtin_family(self.sys.m, self.reaction.builtin_q)
        path = self.reaction.file
        if not os.path.isabs(path):
            path = os.path.join(self.base_dir, path)
        return load_reaction_file(path, self.sys.m)

    def assumption_reports(self, settings: Optional[Settings] = None,
                           spec: Optional[ReactionSpec] = None) -> List[AssumptionReport]:
        """Sample quasipositivity always and the balance inequality when reaction.D is given."""
        settings = settings or Settings()
        spec = self.reaction_spec() if spec is None else spec
        reports = [check_A1(spec, n_samples=settings.samples, seed=self.seed)]
        if self.reaction.D:
            reports.append(
                check_A3(spec, self.reaction.D, self.reaction.C2, n_samples=settings.samples, seed=self.seed)
            )
        for report in reports:
            if not report:
                logger.warning(f"{report.name} violated at W={report.worst_point.tolist()} "
                               f"(margin {report.worst_margin:.3e})")
        return reports

    def boundary_spec(self) -> BoundarySpec:
        m = self.sys.m
        kinds = self.bc.kind * m if len(self.bc.kind) == 1 else self.bc.kind
        alpha = self.bc.alpha * m if len(self.bc.alpha) == 1 else self.bc.alpha
        return BoundarySpec(kinds=kinds, alpha=alpha, beta=self.bc.beta)

    def lyapunov_config(self, dec: SpectralDecomposition) -> LyapunovConfig:
        """Explicit thetas are taken as given (the run re-checks them); 'auto' runs the grid search."""
        if self.lyapunov.theta == 'auto':
            return theta_search(dec, self.lyapunov.p_m)
        return LyapunovConfig(p_m=self.lyapunov.p_m, thetas=self.lyapunov.theta)

    def build(self, settings: Optional[Settings] = None) -> SimConfig:
        settings = settings or Settings()
        sys = self.toeplitz()
        mesh = Mesh1D(X=self.mesh.X, n_cells=self.mesh.n_cells)
        if len(self.init.u0) != sys.m:
            raise InvalidInputError(f"init.u0 needs {sys.m} entries, got {len(self.init.u0)}")
        U0 = initial_field(self.init.u0, mesh, self.init.profile, self.init.amplitude, self.init.noise, self.seed)
        return SimConfig(
            system=sys,
            region=self.region_spec(),
            reaction=self.reaction_spec(),
            lyapunov=self.lyapunov_config(decompose(sys)),
            mesh=mesh,
            boundary=self.boundary_spec(),
            U0=U0,
            T_final=self.time.T_final,
            dt=self.time.dt,
            sample_every=self.time.sample_every,
            blowup_threshold=settings.blowup_threshold,
            membership_tol=settings.membership_tol,
        )


def parse_config_text(text: str, base_dir: str = '.') -> RunConfig:
    """
    Parse `key = value` lines into a RunConfig.

    Raises:
        InvalidInputError: malformed lines, duplicate keys, unknown keys or invalid values
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise InvalidInputError(f"line {lineno}: expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split('=', 1))
        section, _, name = key.rpartition('.')
        target = raw.setdefault(section, {}) if section else raw
        if not isinstance(target, dict) or name in target:
            raise InvalidInputError(f"line {lineno}: duplicate or conflicting key '{key}'")
        target[name] = value

    try:
        return RunConfig(**raw, base_dir=base_dir)
    except ValidationError as e:
        raise InvalidInputError(f"invalid run configuration:\n{e}") from e


def load_config(path: str) -> RunConfig:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise InvalidInputError(f"cannot read config {path}: {e}") from e
    config = parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)))
    logger.info(f"Loaded run config from {path}")
    return config


DEMO_CONFIG = """\
# Builtin reaction family, m = 2, data inside the region L = {1, 2}
sys.m = 2
sys.a = 3
sys.b = 1

bc.kind = neumann
bc.beta = 0, 0

region.L = 1, 2

reaction.builtin_q = 1
reaction.D = 2
reaction.C2 = 1

lyapunov.p_m = 2
lyapunov.theta = auto

mesh.X = 3.141592653589793
mesh.n_cells = 64

time.T_final = 1.0
time.sample_every = 4

init.u0 = 2, 1
init.profile = cosine
init.amplitude = 0.5
init.noise = 0.1

seed = 7
"""

BLOWUP_CONFIG = """\
# F_l = w_l^2 violates the balance assumption; w starts at 1 in both components
sys.m = 2
sys.a = 3
sys.b = 1

bc.kind = neumann

region.L = 1, 2

reaction.file = blowup_reaction.txt

lyapunov.p_m = 2
lyapunov.theta = auto

mesh.X = 3.141592653589793
mesh.n_cells = 32

time.T_final = 2.0
time.dt = 0.001
time.sample_every = 50

init.u0 = 1.1547005383792517, 0

seed = 0
"""

BLOWUP_REACTION = """\
# component coefficient e1 e2
1 1.0 2 0
2 1.0 0 2
"""


def write_demo_config(path: str, kind: str = 'builtin') -> str:
    """Write a ready-to-run config; the blow-up variant also writes its reaction file alongside."""
    if kind not in ('builtin', 'blowup'):
        raise InvalidInputError(f"unknown demo kind '{kind}'")
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(DEMO_CONFIG if kind == 'builtin' else BLOWUP_CONFIG)
    if kind == 'blowup':
        with open(os.path.join(directory, 'blowup_reaction.txt'), 'w', encoding='utf-8') as f:
            f.write(BLOWUP_REACTION)
    logger.info(f"Wrote {kind} demo config to {path}")
    return path
