"""Exact verification toolkit for the Jacobi-Moser, Neumann-Uhlenbeck and dual
Moser integrable systems on the n-sphere."""

__version__ = "0.1.0"
