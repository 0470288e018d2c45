"""Numerical verification toolkit for scalar-flat Kahler surfaces with symmetry."""

__version__ = "0.1.0"
