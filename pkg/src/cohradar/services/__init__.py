"""Signal synthesis, receivers, closed forms and estimators."""

from .montecarlo import MonteCarloRunner

__all__ = ["MonteCarloRunner"]
