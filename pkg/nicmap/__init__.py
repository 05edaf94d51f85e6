"""Contention-aware process mapping and channel queueing simulation."""

__version__ = "1.0.0"
