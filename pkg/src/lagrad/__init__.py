"""Lagrangian Radon transform toolkit."""
__version__ = "0.1.0"
