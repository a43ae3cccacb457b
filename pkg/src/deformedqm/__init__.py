"""Numerical library for deformed canonical commutation relations."""

__version__ = "0.1.0"
