"""Exact polyhedral-complex analysis and PL Morse topology of scalar ReLU networks."""

__version__ = "0.1.0"
