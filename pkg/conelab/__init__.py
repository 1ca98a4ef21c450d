"""Maximal, positive and strictly maximal points of convex sets under cone orders."""

__version__ = "0.1.0"
