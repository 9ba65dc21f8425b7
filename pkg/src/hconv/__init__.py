"""Harmonic-map convolution toolkit: truncated series, shears, Hadamard products, verifiers."""

__version__ = "0.1.0"
