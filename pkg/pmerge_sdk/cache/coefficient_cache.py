"""
Coefficient cache for solved M-family coefficients
"""

import json
import logging
import math
import threading
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

from ..models.base_models import MCoefficients
from config.settings import get_cache_config

logger = logging.getLogger(__name__)

CacheKey = Tuple[str, int]


class CoefficientCache:
    """
    Process-local memo of MCoefficients keyed by (r, K)

    Features:
    - Idempotent insertion (a concurrent duplicate solve stores the same value)
    - Optional JSON file persistence between runs
    - Thread-safe operations
    """

    def __init__(self, cache_file: Optional[str] = None, persist: Optional[bool] = None):
        """
        Initialize Coefficient Cache

        Args:
            cache_file: Optional custom cache file path
            persist: Write solved coefficients back to the cache file
                (uses PMERGE_PERSIST_COEFFS if not provided)
        """
        cache_config = get_cache_config()
        self.persist = cache_config["persist_coefficients"] if persist is None else persist
        self.cache_file = Path(cache_file or Path(cache_config["cache_dir"]) /
                               cache_config["coefficient_cache_file"])

        self._lock = threading.Lock()
        self._entries: Dict[CacheKey, MCoefficients] = {}
        self.hits = 0
        self.misses = 0

        if self.persist:
            self._load_cached_coefficients()

    @staticmethod
    def make_key(r: float, K: int) -> CacheKey:
        """Cache key; r by its shortest round-trip representation"""
        return (repr(float(r)), int(K))

    def _load_cached_coefficients(self):
        """Load coefficients from cache file"""
        try:
            if self.cache_file.exists():
                with open(self.cache_file, "r", encoding="utf-8") as f:
                    data = json.load(f)
                for item in data.get("coefficients", []):
                    coeffs = MCoefficients.from_dict(item)
                    self._entries[self.make_key(coeffs.r, coeffs.K)] = coeffs
                logger.debug(f"Loaded {len(self._entries)} cached coefficient sets")
        except (json.JSONDecodeError, IOError, KeyError, TypeError) as e:
            logger.warning(f"Failed to load coefficient cache: {e}")
            self._entries = {}

    def _save_to_cache(self):
        """Save all coefficients to cache file"""
        try:
            self.cache_file.parent.mkdir(parents=True, exist_ok=True)
            payload = {"coefficients": [c.to_dict() for c in self._entries.values()
                                        if math.isfinite(c.r)]}
            with open(self.cache_file, "w", encoding="utf-8") as f:
                json.dump(payload, f, indent=2)
        except IOError as e:
            logger.warning(f"Failed to save coefficient cache: {e}")

    def get(self, r: float, K: int) -> Optional[MCoefficients]:
        """Return cached coefficients or None"""
        with self._lock:
            coeffs = self._entries.get(self.make_key(r, K))
            if coeffs is not None:
                self.hits += 1
            return coeffs

    def get_or_solve(self, r: float, K: int,
                     solver: Callable[[float, int], MCoefficients]) -> MCoefficients:
        """
        Return cached coefficients, solving and storing them on a miss

        The solver runs outside the lock; a racing duplicate insert keeps the
        first stored value.
        """
        cached = self.get(r, K)
        if cached is not None:
            return cached

        coeffs = solver(r, K)
        with self._lock:
            self.misses += 1
            stored = self._entries.setdefault(self.make_key(r, K), coeffs)
            if self.persist and stored is coeffs:
                self._save_to_cache()
        return stored

    def clear(self):
        """Drop all cached entries"""
        with self._lock:
            self._entries.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        return len(self._entries)


_default_cache: Optional[CoefficientCache] = None
_default_lock = threading.Lock()


def get_default_cache() -> CoefficientCache:
    """Shared process-wide coefficient cache"""
    global _default_cache
    with _default_lock:
        if _default_cache is None:
            _default_cache = CoefficientCache()
        return _default_cache
