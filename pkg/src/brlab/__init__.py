"""Numerical laboratory for spectral Bochner-Riesz means and square functions."""

__version__ = "0.1.0"
