"""Scholarly search engine with citation-aware, embedding-scored query expansion."""

__version__ = "0.1.0"
