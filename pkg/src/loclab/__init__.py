"""Localization and dimerization diagnostics for one-dimensional lattice fermions."""

__version__ = "0.1.0"
