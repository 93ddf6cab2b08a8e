"""Steiner symmetrization of planar convex bodies and Steiner processes."""

__version__ = "0.1.0"
