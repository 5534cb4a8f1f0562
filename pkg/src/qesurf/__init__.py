"""Symbolic-numeric toolkit for quasi-Einstein analysis on homogeneous affine surfaces."""

__version__ = "0.1.0"
