"""Numerical toolkit for p-power twisted GL(2) exponential sums."""

__version__ = "0.1.0"
