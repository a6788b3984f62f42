"""Exact counting of integer points near smooth curves, with explicit bounds."""

__version__ = "0.1.0"
