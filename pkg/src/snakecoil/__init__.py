"""Isotopy types of real plane curve arrangements containing snakes."""

__version__ = "0.1.0"
