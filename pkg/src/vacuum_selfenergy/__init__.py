"""Renormalized vacuum electric and magnetic energy densities around polarizable sources."""

__version__ = "0.1.0"
