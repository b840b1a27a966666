"""Steenrod algebra, unstable modules, minimal resolutions and Ext over GF(2)."""

__version__ = "0.1.0"
