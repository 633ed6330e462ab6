"""Finite-set constraint solving with ROBDD domains and propagators."""

__version__ = "0.1.0"
