"""
Merging two p-values: diagonal curves and upper p-probabilities of lower sets

An increasing right-continuous f: [0,1) -> [0,1] has the epigraph boundary
{(u1, u2) : f(u1-) <= u2 <= f(u1)} with f(0-) = 0 and f(1) = 1, a monotone
curve from (0, 0) to (1, 1). Every admissible two-input merger is
F(p1, p2) = u1 + u2 for the largest curve point (u1, u2) <= (p1, p2).
"""

import logging
from typing import Sequence, Tuple, Union

import numpy as np

from pmerge_sdk.merging import MergeMethod
from pmerge_sdk.models.base_models import CurveError, EmptySetError, RangeError

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


def _as_points(points: Sequence[Point]) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise CurveError(f"Expected a sequence of (u1, u2) points, got shape {arr.shape}")
    if np.any(~np.isfinite(arr)) or np.any((arr < 0) | (arr > 1)):
        raise CurveError("Curve points must lie in [0, 1]^2")
    return arr


class DiagonalCurve:
    """
    Epigraph boundary stored as a polyline with knots increasing in both coordinates

    Consecutive knots are joined by straight segments; a vertical segment
    is a jump of f and a horizontal one a flat piece. The knot list is
    completed with (0, 0) in front and (1, 1) at the end when missing.

    Raises:
        CurveError: If some coordinate decreases along the knots
    """

    def __init__(self, points: Sequence[Point]):
        arr = _as_points(points) if len(points) else np.empty((0, 2))
        if arr.size and np.any(np.diff(arr, axis=0) < 0):
            raise CurveError("Diagonal curve knots must be nondecreasing in both coordinates")
        if not arr.size or tuple(arr[0]) != (0.0, 0.0):
            arr = np.vstack([[0.0, 0.0], arr])
        if tuple(arr[-1]) != (1.0, 1.0):
            arr = np.vstack([arr, [1.0, 1.0]])
        self.knots = arr

    @classmethod
    def identity(cls) -> "DiagonalCurve":
        """f(u) = u, the curve of Bonferroni"""
        return cls([(0.0, 0.0), (1.0, 1.0)])

    @classmethod
    def from_function(cls, us: Sequence[float], left: Sequence[float],
                      right: Sequence[float]) -> "DiagonalCurve":
        """
        Curve of an increasing f given at breakpoints us by f(u-) and f(u)

        f is linear between breakpoints.
        """
        points = []
        for u, lo, hi in zip(us, left, right):
            if lo > hi:
                raise CurveError(f"f({u}-) = {lo} exceeds f({u}) = {hi}")
            points.extend([(u, lo), (u, hi)])
        return cls(points)

    def merge(self, p1: float, p2: float) -> float:
        return diag_curve_merge(self, p1, p2)

    def method(self) -> MergeMethod:
        return MergeMethod.diag_curve(self)

    def __repr__(self) -> str:
        return f"DiagonalCurve(knots={self.knots.tolist()})"


def diag_curve_merge(curve: DiagonalCurve, p1: float, p2: float) -> float:
    """
    u1 + u2 ^ 1 for the largest point (u1, u2) of the curve with (u1, u2) <= (p1, p2)

    The points below (p1, p2) form an initial piece of the curve, which always
    contains the origin, so the value is 0 when only the origin qualifies.

    Raises:
        RangeError: If p1 or p2 lies outside [0, 1]
    """
    if not (0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0):
        raise RangeError(f"Diagonal-curve merging takes p-values in [0, 1], got ({p1}, {p2})")
    target = np.array([p1, p2])
    best = curve.knots[0]
    for start, end in zip(curve.knots[:-1], curve.knots[1:]):
        if np.any(start > target):
            break
        step = end - start
        t = 1.0
        for axis in range(2):
            if step[axis] > 0:
                t = min(t, (target[axis] - start[axis]) / step[axis])
        best = start + t * step
        if t < 1.0:
            break
    return float(min(best[0] + best[1], 1.0))


class LowerSetBoundary:
    """
    Lower set E of [0,1]^2 given by its upper boundary polyline

    Knots run with u1 nondecreasing and u2 nonincreasing; the boundary is
    extended horizontally to the u2 axis and vertically down to the u1 axis.

    Raises:
        EmptySetError: If no knots are given
        CurveError: If the knots do not describe a lower set
    """

    def __init__(self, points: Sequence[Point]):
        if not len(points):
            raise EmptySetError("Lower set has no boundary points")
        arr = _as_points(points)
        steps = np.diff(arr, axis=0)
        if np.any(steps[:, 0] < 0) or np.any(steps[:, 1] > 0):
            raise CurveError("Lower set boundary must move right and down")
        if arr[0, 0] > 0:
            arr = np.vstack([[0.0, arr[0, 1]], arr])
        if arr[-1, 1] > 0:
            arr = np.vstack([arr, [arr[-1, 0], 0.0]])
        self.knots = arr

    @classmethod
    def anti_diagonal(cls, t: float) -> "LowerSetBoundary":
        """{u1 + u2 <= t}, t <= 1"""
        return cls([(0.0, t), (t, 0.0)])

    @classmethod
    def rectangle(cls, a: float, b: float = 1.0) -> "LowerSetBoundary":
        """[0, a] x [0, b]"""
        return cls([(0.0, b), (a, b), (a, 0.0)])


def ucp_lower_set_k2(boundary: Union[LowerSetBoundary, Sequence[Point]]) -> float:
    """
    Upper p-probability of a lower set: 1 ^ inf{u1 + u2 : (u1, u2) not in E}

    u1 + u2 is linear, so the infimum over the complement is attained at a
    boundary knot.

    Raises:
        EmptySetError: If the set is empty
    """
    if not isinstance(boundary, LowerSetBoundary):
        boundary = LowerSetBoundary(boundary)
    return float(min(np.min(boundary.knots.sum(axis=1)), 1.0))
