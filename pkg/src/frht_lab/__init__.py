"""Numerical laboratory for the fractional Hankel transform."""

__version__ = "0.1.0"
