from src.simulate.mesh import (
    BoundarySpec,
    Mesh1D,
    continuous_max,
    initial_field,
    lp_norm,
    sup_norm,
    trapezoid_mean,
)
from src.simulate.monitors import GronwallFit, corollary_ratio, fit_gronwall, lyapunov_functional
from src.simulate.solver import SimConfig, SimResult, SimState, SplitStepper, run, step, validate_preconditions
from src.simulate.coupled import CoupledStepper, CrossCheckReport, cross_check

__all__ = [
    "BoundarySpec",
    "Mesh1D",
    "continuous_max",
    "initial_field",
    "lp_norm",
    "sup_norm",
    "trapezoid_mean",
    "GronwallFit",
    "corollary_ratio",
    "fit_gronwall",
    "lyapunov_functional",
    "SimConfig",
    "SimResult",
    "SimState",
    "SplitStepper",
    "run",
    "step",
    "validate_preconditions",
    "CoupledStepper",
    "CrossCheckReport",
    "cross_check",
]
