"""Caching module for pmerge SDK"""

from .coefficient_cache import CoefficientCache, get_default_cache

__all__ = ["CoefficientCache", "get_default_cache"]
