"""
Toeplitz Reaction-Diffusion Verifier - Core Package

Spectral diagonalization, invariant regions, Lyapunov-functional conditions and a
desk-scale simulator for m-component reaction-diffusion systems whose diffusion
matrix is tridiagonal symmetric Toeplitz.
"""

__version__ = "1.0.0"
__author__ = "Toeplitz RD Team"
