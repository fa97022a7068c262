"""Exact tools for checking Selmer companion pairs of elliptic curves over Q."""

__version__ = "0.1.0"
