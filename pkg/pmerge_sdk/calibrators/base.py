"""
Calibrator base classes
"""

import logging
import math
from abc import ABC, abstractmethod
from enum import Enum
from functools import cached_property
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from ..models.base_models import RangeError
from config.settings import get_solver_config

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# relative tolerance for landing on a step edge, so x = edge (1 + O(eps)) keeps the left value
EDGE_SNAP = 1e-12


class ConvexityClass(str, Enum):
    """Shape of a calibrator on its strictly decreasing segment"""
    STRICTLY_CONVEX = "strictly_convex"
    STRICTLY_CONCAVE = "strictly_concave"
    PIECEWISE_CONSTANT = "piecewise_constant"
    OTHER = "other"


class Calibrator(ABC):
    """
    Decreasing p-to-e calibrator f: [0, inf) -> [0, inf]

    f vanishes on (1, inf) and integrates to at most 1 over [0, 1]. Subclasses
    implement the closed form on (0, 1]; the value at 0 and the zero tail are
    handled here.

    Attributes:
        name: Spec string or description
        K: Number of inputs the calibrator is built for (None if generic)
        eta: Length of the initial plateau at height K, when there is one
        tau: Right end of the strictly decreasing segment
        convexity_class: Declared shape on (eta, tau]
        admissible: f(0) = inf, upper semicontinuous and integral exactly 1
        value_at_zero: f(0)
    """

    def __init__(self, name: str, K: Optional[int], value_at_zero: float,
                 convexity_class: ConvexityClass, admissible: bool,
                 eta: Optional[float] = None, tau: Optional[float] = None):
        self.name = name
        self.K = K
        self.value_at_zero = float(value_at_zero)
        self.convexity_class = convexity_class
        self.admissible = admissible
        self.eta = eta
        self.tau = tau

    @abstractmethod
    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        """Closed form on x in (0, 1]"""

    def breakpoints(self) -> List[float]:
        """Points in (0, 1) where f has a kink or a jump"""
        return []

    def __call__(self, x: ArrayLike) -> ArrayLike:
        scalar = np.ndim(x) == 0
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(arr.shape, dtype=float)

        zero = arr == 0.0
        inside = (arr > 0.0) & (arr <= 1.0)
        out[zero] = self.value_at_zero
        if np.any(inside):
            out[inside] = self._evaluate(arr[inside])

        return float(out[0]) if scalar else out

    def _integrate(self) -> float:
        tol = get_solver_config()["quad_tolerance"]
        edges = [0.0] + sorted(b for b in self.breakpoints() if 0.0 < b < 1.0) + [1.0]
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            value, _ = integrate.quad(lambda t: self(t), a, b, epsabs=tol * 1e-2,
                                      epsrel=tol, limit=200)
            total += value
        return total

    @cached_property
    def integral_on_unit(self) -> float:
        """Numerical value of the integral of f over [0, 1]"""
        value = self._integrate()
        logger.debug(f"Integral of {self.name} on [0,1] = {value!r}")
        return value

    def is_decreasing(self, grid_size: int = 10_000) -> bool:
        """Sampled check that f is decreasing on [0, 2]"""
        grid = np.linspace(0.0, 2.0, grid_size)
        values = self(grid)
        return bool(np.all(np.diff(values) <= 1e-12 * np.maximum(1.0, np.abs(values[:-1]))))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r}, K={self.K})"


class StepCalibrator(Calibrator):
    """
    Left-continuous step calibrator

    f = values[i] on (edges[i-1], edges[i]] with edges[-1] the end of the
    support; f = 0 beyond it.
    """

    def __init__(self, name: str, K: Optional[int], edges: Sequence[float],
                 values: Sequence[float], value_at_zero: Optional[float] = None,
                 admissible: bool = False):
        edges_arr = np.asarray(edges, dtype=float)
        values_arr = np.asarray(values, dtype=float)
        if edges_arr.shape != values_arr.shape or edges_arr.size == 0:
            raise RangeError("Step calibrator needs matching non-empty edges and values")
        if np.any(np.diff(edges_arr) <= 0) or edges_arr[0] <= 0 or edges_arr[-1] > 1:
            raise RangeError("Step edges must increase within (0, 1]")
        if np.any(np.diff(values_arr) > 0) or np.any(values_arr < 0):
            raise RangeError("Step values must be nonnegative and decreasing")

        zero_value = values_arr[0] if value_at_zero is None else value_at_zero
        super().__init__(name, K, zero_value, ConvexityClass.PIECEWISE_CONSTANT, admissible,
                         eta=None, tau=float(edges_arr[-1]))
        self.edges = edges_arr
        self.values = values_arr

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.edges, x * (1.0 - EDGE_SNAP), side="left")
        padded = np.append(self.values, 0.0)
        return padded[idx]

    def breakpoints(self) -> List[float]:
        return [float(e) for e in self.edges if e < 1.0]

    def _integrate(self) -> float:
        widths = np.diff(np.concatenate(([0.0], self.edges)))
        return math.fsum(widths * self.values)
