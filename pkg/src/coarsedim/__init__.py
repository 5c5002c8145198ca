"""Coarse structures on discrete groups and verified asymptotic-dimension certificates."""

__version__ = "0.1.0"
