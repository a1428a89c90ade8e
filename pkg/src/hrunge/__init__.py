"""Constructive Runge-type approximation on sub-domains of the disk and bidisk."""

__version__ = "0.1.0"
