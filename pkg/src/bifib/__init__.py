"""Proof search, normalization and enumeration for free bifibrations."""

__version__ = "0.1.0"
