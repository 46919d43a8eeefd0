"""Partially coherent radar: sweep simulation, theory and range estimation."""

__version__ = "0.1.0"
