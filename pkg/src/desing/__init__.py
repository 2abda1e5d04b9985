"""Exact commutative-algebra engine with constructive desingularization
certificates over one-dimensional local base rings."""

__version__ = "0.1.0"
