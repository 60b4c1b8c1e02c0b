"""Finite-dimensional operator algebra toolkit for graph and k-graph representations."""
__version__ = "0.1.0"
