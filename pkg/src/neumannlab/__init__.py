"""Computational workbench for the B.H. Neumann groups G(P)."""

__version__ = "0.1.0"
