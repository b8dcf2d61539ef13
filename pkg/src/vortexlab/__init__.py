"""Vortex standing waves of focusing NLS on rotationally symmetric manifolds."""

__version__ = "0.1.0"
