"""Exact homology-constrained minimum-cost circulations on surface-embedded digraphs."""

__version__ = "0.1.0"
