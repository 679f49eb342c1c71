"""Exact computation and Monte Carlo sampling for random-cluster measures on finite graphs."""

__version__ = "0.1.0"
