"""Models module for pmerge SDK"""

from .base_models import (
    PMergeError,
    InputError,
    LengthError,
    InvalidPValueError,
    CSVParseError,
    DomainError,
    RangeError,
    ConvergenceError,
    NonMonotoneError,
    ArityError,
    NoRejectionError,
    EmptySetError,
    CurveError,
    MethodError,
    as_ext_real,
    PVector,
    MergeResult,
    MCoefficients,
    WeightVector,
)

__all__ = [
    "PMergeError",
    "InputError",
    "LengthError",
    "InvalidPValueError",
    "CSVParseError",
    "DomainError",
    "RangeError",
    "ConvergenceError",
    "NonMonotoneError",
    "ArityError",
    "NoRejectionError",
    "EmptySetError",
    "CurveError",
    "MethodError",
    "as_ext_real",
    "PVector",
    "MergeResult",
    "MCoefficients",
    "WeightVector",
]
