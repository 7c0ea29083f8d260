"""Workbench for valued quivers, finite-field species and their Hall algebras."""

__version__ = "0.1.0"
