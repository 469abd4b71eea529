"""Core p-value vector operations"""

from .pvector import (
    MergeFunction,
    validate_pvector,
    zero_one_adjust,
    lsc_version,
    read_pvector_csv,
)

__all__ = [
    "MergeFunction",
    "validate_pvector",
    "zero_one_adjust",
    "lsc_version",
    "read_pvector_csv",
]
