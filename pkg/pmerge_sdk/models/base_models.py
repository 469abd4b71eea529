"""
Base models and exceptions for pmerge SDK
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Dict, Any, Sequence, Union

import numpy as np
from dataclasses_json import dataclass_json


class PMergeError(Exception):
    """Base pmerge error exception"""

    exit_code = 3

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class InputError(PMergeError):
    """Malformed input data"""

    exit_code = 2


class LengthError(InputError):
    """Vector has fewer entries than required"""
    pass


class InvalidPValueError(InputError, ValueError):
    """Negative, NaN or infinite p-value entry"""
    pass


class CSVParseError(InputError):
    """Unparseable line in a p-value CSV file"""

    def __init__(self, message: str, line_number: Optional[int] = None,
                 details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.line_number = line_number


class DomainError(PMergeError):
    """Request outside the mathematical domain of an operation"""
    pass


class RangeError(DomainError, ValueError):
    """Parameter outside its admissible range"""
    pass


class ConvergenceError(DomainError):
    """Root bracketing or bisection failed"""
    pass


class NonMonotoneError(DomainError):
    """Merging function observed to decrease along an increasing path"""
    pass


class ArityError(DomainError):
    """Merging family has no definition for the requested number of inputs"""
    pass


class NoRejectionError(DomainError):
    """No parameter value reaches the requested significance target"""
    pass


class EmptySetError(DomainError):
    """Lower set description is empty"""
    pass


class CurveError(DomainError):
    """Diagonal curve is not increasing"""
    pass


class MethodError(DomainError):
    """Unknown or unparseable method, family or calibrator string"""
    pass


def as_ext_real(value: Union[float, int]) -> float:
    """
    Coerce to an extended nonnegative real (IEEE double, +inf allowed)

    Raises:
        InvalidPValueError: If value is NaN, -inf or negative
    """
    x = float(value)
    if np.isnan(x) or x < 0:
        raise InvalidPValueError(f"Expected a value in [0, +inf], got {value!r}")
    return x


@dataclass(frozen=True, eq=False)
class PVector:
    """
    Validated vector of K p-values with cached order statistics

    Entries above 1 are accepted (merging functions are defined on [0, inf)^K);
    the informative part of the domain is [0, 1]^K.
    """
    values: np.ndarray

    def __post_init__(self):
        """Validate entries and freeze the underlying array"""
        try:
            arr = np.array(self.values, dtype=float).ravel()
        except (TypeError, ValueError) as e:
            raise InvalidPValueError(f"p-values must be real numbers: {e}")

        if arr.size < 2:
            raise LengthError(f"A p-value vector needs K >= 2 entries, got {arr.size}",
                              {"K": int(arr.size)})

        bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0))
        if bad.size:
            i = int(bad[0])
            raise InvalidPValueError(
                f"Entry {i} is not a finite nonnegative p-value: {arr[i]!r}",
                {"index": i, "value": float(arr[i])},
            )

        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def K(self) -> int:
        """Number of p-values"""
        return int(self.values.size)

    @cached_property
    def sorted_view(self) -> np.ndarray:
        """Ascending order statistics p_(1) <= ... <= p_(K) (stable sort)"""
        view = np.sort(self.values, kind="stable")
        view.setflags(write=False)
        return view

    def order_stat(self, m: int) -> float:
        """Return p_(m), 1-based"""
        return float(self.sorted_view[m - 1])

    def prefix(self, m: int) -> np.ndarray:
        """The m smallest entries, ascending"""
        return self.sorted_view[:m]

    @property
    def min(self) -> float:
        return float(self.sorted_view[0])

    def clipped(self) -> "PVector":
        """Componentwise p ^ 1"""
        return PVector(np.minimum(self.values, 1.0))

    def scaled(self, factor: float) -> "PVector":
        return PVector(self.values * factor)

    def __len__(self) -> int:
        return self.K

    def __repr__(self) -> str:
        head = ", ".join(f"{v:.4g}" for v in self.values[:6])
        more = ", ..." if self.K > 6 else ""
        return f"PVector(K={self.K}, values=[{head}{more}])"


@dataclass_json
@dataclass(frozen=True)
class MergeResult:
    """Merged p-value with the method that produced it"""
    p: float
    method_tag: str
    accuracy_bound: float = 0.0

    def __post_init__(self):
        """Validate range invariants"""
        if not 0.0 <= self.p <= 1.0:
            raise RangeError(f"Merged p-value {self.p!r} outside [0, 1]")
        if self.accuracy_bound < 0:
            raise RangeError(f"Negative accuracy bound {self.accuracy_bound!r}")


@dataclass_json
@dataclass(frozen=True)
class MCoefficients:
    """
    Solved coefficients of the M-family for exponent r and K inputs

    c_r, d_r = 1 - (K-1) c_r define the calibrator breakpoints and
    b_rK = 1 / M_{r,K}(c_r, d_r, ..., d_r) is the precise multiplier.
    """
    r: float
    K: int
    c_r: float
    d_r: float
    b_rK: float
    residual: float = 0.0
    branch: str = "closed_form"

    def matches(self, r: float, K: int) -> bool:
        """Check that these coefficients were solved for (r, K)"""
        return self.K == K and (self.r == r or (np.isnan(self.r) and np.isnan(r)))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Point of the simplex: K nonnegative weights summing to one"""
    lambdas: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        """Validate simplex membership"""
        arr = np.array(self.lambdas, dtype=float).ravel()
        if arr.size == 0:
            raise LengthError("Weight vector is empty")
        if np.any(~np.isfinite(arr)) or np.any(arr < 0):
            raise RangeError("Weights must be finite and nonnegative")
        if abs(float(np.sum(arr)) - 1.0) > 1e-12:
            raise RangeError(f"Weights must sum to 1, got {float(np.sum(arr))!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "lambdas", arr)

    @classmethod
    def uniform(cls, K: int) -> "WeightVector":
        """The arithmetic-average weights (1/K, ..., 1/K)"""
        return cls(np.full(K, 1.0 / K))

    @classmethod
    def from_sequence(cls, weights: Sequence[float]) -> "WeightVector":
        return cls(np.asarray(weights, dtype=float))

    @property
    def K(self) -> int:
        return int(self.lambdas.size)
