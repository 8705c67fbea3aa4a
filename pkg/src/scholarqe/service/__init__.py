"""HTTP service wrapping the search engine."""

from .app import create_app

__all__ = ["create_app"]
