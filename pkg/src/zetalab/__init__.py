"""Numerical laboratory for the value distribution of log zeta near its zeros."""

__version__ = "0.1.0"
