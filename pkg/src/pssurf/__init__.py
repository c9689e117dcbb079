"""Symbolic and numeric toolkit for systems of PDEs describing
pseudospherical or spherical surfaces."""

__version__ = "0.1.0"
