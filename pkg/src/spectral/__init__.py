from src.spectral.toeplitz import (
    ToeplitzSystem,
    SpectralDecomposition,
    decompose,
    diffusion_matrix,
    eigen_residuals,
    parabolicity_check,
    sine_matrix,
    to_u,
    to_w,
)

__all__ = [
    "ToeplitzSystem",
    "SpectralDecomposition",
    "decompose",
    "diffusion_matrix",
    "eigen_residuals",
    "parabolicity_check",
    "sine_matrix",
    "to_u",
    "to_w",
]
