"""Exact polynomial solutions of the Navier and Lame equations."""

__version__ = "0.1.0"
