"""K-functional interpolation toolkit."""

__version__ = "0.1.0"
