"""Computational engine for (1+1)-dimensional pro-p topological quantum field theories."""

__version__ = "0.1.0"
