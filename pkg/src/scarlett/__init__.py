"""Exact diagonalization and quench dynamics for bosons with correlated hopping."""

__version__ = "0.1.0"
