"""Exact construction of the Kontsevich-Penner tau-function and its constraint algebra."""

__version__ = "0.1.0"
