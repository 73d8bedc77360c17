"""Temporal structural-role embeddings with diachronic alignment and drift metrics."""

__version__ = "0.1.0"
