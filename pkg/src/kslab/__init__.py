"""Exact verification toolkit for log-concavity of linear-extension statistics."""

__version__ = "0.1.0"
