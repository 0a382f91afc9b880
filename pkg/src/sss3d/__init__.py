"""Soft subdivision search for rod and ring robots moving in R^3 x S^2."""

__version__ = "0.1.0"
