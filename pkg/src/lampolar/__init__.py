"""Polar-method analysis of coupled composite laminates."""

__version__ = "0.1.0"
