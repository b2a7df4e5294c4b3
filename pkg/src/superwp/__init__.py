"""Exact intersection numbers and Weil-Petersson volumes for the Theta class."""
from .combinatorics import MultiIndex
from .correlator import CorrelatorKey, correlator, corr

__all__ = ["MultiIndex", "CorrelatorKey", "correlator", "corr"]
__version__ = "0.1.0"
