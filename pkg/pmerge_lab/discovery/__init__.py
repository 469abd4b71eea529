"""Discovery matrices for true-discovery guarantees"""

from .models import DiscoveryMatrix, DiscoverySummary
from .matrix import (
    discovery_matrix,
    brute_force_discovery_matrix,
    median_discovery_matrix,
    evaluate_subset,
    check_family,
    categorize,
    true_discovery_lower_bound,
)

__all__ = [
    "DiscoveryMatrix",
    "DiscoverySummary",
    "discovery_matrix",
    "brute_force_discovery_matrix",
    "median_discovery_matrix",
    "evaluate_subset",
    "check_family",
    "categorize",
    "true_discovery_lower_bound",
]
