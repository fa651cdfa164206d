"""Numerical and combinatorial checks for a translationally invariant
spin-chain construction: exact arithmetic, reversible Turing machines, the
clock, penalized cycle spectra, block energies, the ground-energy density
series and the Robinson square hierarchy."""

__version__ = "0.1.0"
