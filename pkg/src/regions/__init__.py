from src.regions.invariant_regions import (
    RegionCheck,
    RegionSpec,
    SignedTransform,
    accepting_regions,
    boundary_compat,
    enumerate_regions,
    membership,
    signed_transform,
)

__all__ = [
    "RegionCheck",
    "RegionSpec",
    "SignedTransform",
    "accepting_regions",
    "boundary_compat",
    "enumerate_regions",
    "membership",
    "signed_transform",
]
