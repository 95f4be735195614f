"""Exact-rational representation-theory engine for handlebody Torelli computations."""

__version__ = "0.1.0"
