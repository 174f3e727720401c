"""Singular exponents and weighted regularity windows for the Stokes system
with mixed boundary conditions on polyhedral domains."""

__version__ = "0.1.0"
