"""Computable *-operator frames over finite-dimensional Hilbert C*-modules."""

__version__ = "0.1.0"
