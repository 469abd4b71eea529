"""
MergeMethod: one handle for every merging family, plus the method-string parser
"""

import logging
import math
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from ..calibrators.base import Calibrator
from ..calibrators.families import (
    calibrator_from_spec,
    grid_harmonic_calibrator,
    parse_calibrator_spec,
)
from ..core.pvector import validate_pvector, zero_one_adjust, PVectorLike
from ..models.base_models import MergeResult, MethodError, RangeError
from .classic import bonferroni, simes, hommel, o_family, m_family
from .coefficients import solve_m_coefficients
from .induced import InducedMerge, grid_harmonic, merge_induced, m_star, rejects_at
from config.settings import get_solver_config

logger = logging.getLogger(__name__)


class MethodTag(str, Enum):
    """Merging family of a MergeMethod"""
    BONFERRONI = "bonferroni"
    SIMES = "simes"
    HOMMEL = "hommel"
    O_FAMILY = "o_family"
    M_FAMILY = "m_family"
    GRID_HARMONIC = "grid_harmonic"
    O_STAR = "o_star"
    M_STAR = "m_star"
    INDUCED = "induced"
    DIAG_CURVE = "diag_curve"


def format_real(value: float) -> str:
    """Shortest text for a parameter: integral values without a trailing .0"""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


@dataclass(frozen=True)
class MergeMethod:
    """
    Tagged union over the merging families

    Parameters are carried per family: k for the O-family (and its zero-one
    adjusted version o_star), r for the M-family and F*_{r,K}, a calibrator
    spec string and depth M for induced merging, and a curve object with a
    merge(p1, p2) method for two-input diagonal-curve mergers. Coefficients
    and calibrators depend on K and are resolved per input vector.
    """
    tag: MethodTag
    k: Optional[int] = None
    r: Optional[float] = None
    calibrator_spec: Optional[str] = None
    depth: Optional[int] = None
    curve: Any = None
    _calibrators: Dict[int, Calibrator] = field(default_factory=dict, compare=False, repr=False)
    _lock: Any = field(default_factory=threading.Lock, compare=False, repr=False)

    def __post_init__(self):
        """Validate family parameters"""
        if self.tag in (MethodTag.O_FAMILY, MethodTag.O_STAR):
            if self.k is None or self.k < 1:
                raise RangeError(f"O-family index must be >= 1, got {self.k}")
        if self.tag in (MethodTag.M_FAMILY, MethodTag.M_STAR):
            if self.r is None or math.isnan(self.r):
                raise RangeError("M-family exponent r is required and must not be NaN")
        if self.tag == MethodTag.M_STAR and math.isinf(self.r):
            raise RangeError(f"F*_(r,K) needs a finite r, got {self.r}")
        if self.tag == MethodTag.INDUCED:
            if not self.calibrator_spec:
                raise MethodError("Induced method needs a calibrator spec")
            parse_calibrator_spec(self.calibrator_spec)
            if self.depth is not None and self.depth < 1:
                raise RangeError(f"Binary-search depth must be >= 1, got {self.depth}")
        if self.tag == MethodTag.DIAG_CURVE and not hasattr(self.curve, "merge"):
            raise MethodError("Diagonal-curve method needs a curve with a merge(p1, p2) method")

    @classmethod
    def diag_curve(cls, curve: Any) -> "MergeMethod":
        return cls(MethodTag.DIAG_CURVE, curve=curve)

    @property
    def name(self) -> str:
        """Canonical method string"""
        if self.tag == MethodTag.O_FAMILY:
            return f"o:k={self.k}"
        if self.tag == MethodTag.O_STAR:
            return f"o-star:k={self.k}"
        if self.tag == MethodTag.M_FAMILY:
            return f"m:r={format_real(self.r)}"
        if self.tag == MethodTag.M_STAR:
            return f"m-star:r={format_real(self.r)}"
        if self.tag == MethodTag.GRID_HARMONIC:
            return "grid-harmonic"
        if self.tag == MethodTag.INDUCED:
            suffix = f":M={self.depth}" if self.depth is not None else ""
            return f"induced:{self.calibrator_spec}{suffix}"
        if self.tag == MethodTag.DIAG_CURVE:
            return "diag-curve"
        return self.tag.value

    @property
    def universally_valid(self) -> bool:
        """Simes is a benchmark only; every other family is valid under arbitrary dependence"""
        return self.tag != MethodTag.SIMES

    @property
    def is_symmetric(self) -> bool:
        return self.tag != MethodTag.DIAG_CURVE

    def calibrator(self, K: int) -> Calibrator:
        """Calibrator for K inputs (induced and grid harmonic methods), built once per K"""
        if self.tag not in (MethodTag.GRID_HARMONIC, MethodTag.INDUCED):
            raise MethodError(f"Method {self.name} is not calibrator-induced")
        cached = self._calibrators.get(K)
        if cached is not None:
            return cached
        with self._lock:
            if K not in self._calibrators:
                if self.tag == MethodTag.GRID_HARMONIC:
                    self._calibrators[K] = grid_harmonic_calibrator(K)
                else:
                    self._calibrators[K] = calibrator_from_spec(self.calibrator_spec, K)
            return self._calibrators[K]

    def _depth(self) -> int:
        return self.depth or get_solver_config()["induced_depth"]

    def _evaluate(self, p) -> float:
        tag = self.tag
        if tag == MethodTag.BONFERRONI:
            return bonferroni(p)
        if tag == MethodTag.SIMES:
            return simes(p)
        if tag == MethodTag.HOMMEL:
            return hommel(p)
        if tag in (MethodTag.O_FAMILY, MethodTag.O_STAR):
            return o_family(p, self.k)
        if tag == MethodTag.M_FAMILY:
            return m_family(p, self.r, solve_m_coefficients(self.r, p.K))
        if tag == MethodTag.M_STAR:
            return m_star(p, self.r, solve_m_coefficients(self.r, p.K))
        if tag == MethodTag.GRID_HARMONIC:
            return grid_harmonic(p)
        if tag == MethodTag.DIAG_CURVE:
            if p.K != 2:
                raise RangeError(f"Diagonal-curve mergers take two p-values, got {p.K}")
            return float(self.curve.merge(float(p.values[0]), float(p.values[1])))
        raise MethodError(f"No closed form for {self.name}")

    def merge(self, p: PVectorLike) -> MergeResult:
        """
        Zero-one adjusted merged p-value

        Raises:
            RangeError: If a family parameter does not fit the number of inputs
        """
        p = validate_pvector(p)
        if self.tag == MethodTag.INDUCED:
            im = InducedMerge(self.calibrator(p.K), p.K, self._depth())
            result = merge_induced(p, im)
            return MergeResult(result.p, self.name, result.accuracy_bound)

        accuracy = 0.0
        if self.tag == MethodTag.GRID_HARMONIC and p.K > get_solver_config()["exact_grid_limit"]:
            accuracy = math.ldexp(1.0, -self._depth())
        value = zero_one_adjust(self._evaluate, p)
        return MergeResult(value, self.name, accuracy)

    def __call__(self, p: PVectorLike) -> float:
        return self.merge(p).p

    def rejects(self, p: PVectorLike, alpha: float) -> bool:
        """
        Whether the merged p-value is at most alpha

        Calibrator-induced methods test the rejection region directly,
        (1/K) sum f(p_k/alpha) >= 1, which is exact and needs one pass.
        """
        p = validate_pvector(p)
        if self.tag in (MethodTag.GRID_HARMONIC, MethodTag.INDUCED):
            if alpha >= 1.0:
                return True
            return rejects_at(self.calibrator(p.K), np.minimum(p.sorted_view, 1.0), alpha)
        return self.merge(p).p <= alpha

    def __str__(self) -> str:
        return self.name


_NUMBER = r"[^:]+"
_METHOD_PATTERNS = [
    (re.compile(rf"^o:k=(?P<k>{_NUMBER})$"), MethodTag.O_FAMILY),
    (re.compile(rf"^o-star:k=(?P<k>{_NUMBER})$"), MethodTag.O_STAR),
    (re.compile(rf"^m:r=(?P<r>{_NUMBER})$"), MethodTag.M_FAMILY),
    (re.compile(rf"^m-star:r=(?P<r>{_NUMBER})$"), MethodTag.M_STAR),
]
_INDUCED_PATTERN = re.compile(r"^induced:(?P<spec>.+?)(?::M=(?P<M>[^:]+))?$")
_SIMPLE = {
    "bonferroni": MethodTag.BONFERRONI,
    "simes": MethodTag.SIMES,
    "hommel": MethodTag.HOMMEL,
    "grid-harmonic": MethodTag.GRID_HARMONIC,
}


def _parse_real(text: str, method: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MethodError(f"Cannot parse r={text!r} in method {method!r}")
    if math.isnan(value):
        raise MethodError(f"NaN exponent in method {method!r}")
    return value


def _parse_int(text: str, method: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise MethodError(f"Cannot parse {what}={text!r} in method {method!r}")


def parse_method(text: str) -> MergeMethod:
    """
    Parse a method string

    Accepted: "bonferroni", "simes", "hommel", "grid-harmonic", "o:k=<int>",
    "o-star:k=<int>", "m:r=<real>", "m-star:r=<real>" and
    "induced:<calibrator-spec>[:M=<int>]"; r may be "inf" or "-inf".

    Raises:
        MethodError: If the string is not a known method or a parameter does not parse
    """
    method = text.strip()
    if method in _SIMPLE:
        return MergeMethod(_SIMPLE[method])

    for pattern, tag in _METHOD_PATTERNS:
        match = pattern.match(method)
        if not match:
            continue
        if "k" in match.groupdict():
            return MergeMethod(tag, k=_parse_int(match.group("k"), method, "k"))
        return MergeMethod(tag, r=_parse_real(match.group("r"), method))

    match = _INDUCED_PATTERN.match(method)
    if match:
        depth = match.group("M")
        return MergeMethod(MethodTag.INDUCED, calibrator_spec=match.group("spec"),
                           depth=_parse_int(depth, method, "M") if depth is not None else None)

    raise MethodError(f"Unknown method {text!r}")
