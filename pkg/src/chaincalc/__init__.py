"""Exact finite-depth computations for group chains and their discriminants."""

__version__ = "0.1.0"
