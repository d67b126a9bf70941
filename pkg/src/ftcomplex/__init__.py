"""Fault-tolerant complexes: fusion complexes, their networks, and threshold estimation."""

__version__ = "0.1.0"
