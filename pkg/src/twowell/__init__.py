"""Exact and asymptotic grand-canonical thermodynamics of the two-well boson model."""

__version__ = "0.1.0"
