"""Traction control structures for in-wheel-motor EVs with acoustic
road-type estimation."""

__version__ = "0.1.0"
