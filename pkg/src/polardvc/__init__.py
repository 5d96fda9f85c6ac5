"""Distributed video coding toolkit built on rate-compatible shortened polar codes."""

__version__ = "0.1.0"
