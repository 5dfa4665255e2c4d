"""Numerical laboratory for gradient blow-up in 1D rotating shallow water."""

__version__ = "0.1.0"
