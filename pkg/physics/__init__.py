"""Bound states in the continuum for emitter arrays in a massive waveguide."""

__version__ = "0.1.0"
