"""
Non-symmetric p-merging functions that strictly dominate H*_K for K = 2 and K = 3
"""

import logging
from fractions import Fraction
from typing import List, Optional

import numpy as np

from pmerge_sdk.calibrators import StepCalibrator
from pmerge_sdk.core.pvector import validate_pvector, PVectorLike
from pmerge_sdk.merging import merge_weighted_induced
from pmerge_sdk.models.base_models import MergeResult, RangeError, WeightVector

logger = logging.getLogger(__name__)

# H*_3 is induced by 3g with g = 1 on [0, 2/11], 1/2 on (2/11, 4/11], 1/3 on (4/11, 6/11]
PRIME3_EDGES = (Fraction(2, 11), Fraction(4, 11), Fraction(6, 11))
PRIME3_STEPS = (
    (Fraction(1), Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1), Fraction(1, 2), Fraction(1, 4)),
    (Fraction(1), Fraction(1, 2), Fraction(1, 4)),
)


def _step_value(steps, x: Fraction) -> Fraction:
    for edge, value in zip(PRIME3_EDGES, steps):
        if x <= edge:
            return value
    return Fraction(0)


class PrimeCounterexample:
    """
    Non-symmetric merging function F with F <= H*_K and F < H*_K somewhere

    K = 2: F(p) = 3 p_1 ^ (3/2) p_2 ^ 1.
    K = 3: F(p) = inf{eps : g_1(p_1/eps) + g_2(p_2/eps) + g_3(p_3/eps) >= 1},
    with g_1 = g + (1/6) 1_(4/11, 6/11] and g_2 = g_3 = g - (1/12) 1_(4/11, 6/11].
    The K = 3 value is exact: the rejection sum only changes at eps = p_k / edge,
    and membership is decided in rational arithmetic.
    """

    def __init__(self, K: int):
        if K not in (2, 3):
            raise RangeError(f"Dominating fixtures exist for K = 2 and K = 3 only, got {K}")
        self.K = K
        self.name = f"prime-counterexample:K={K}"

    def calibrators(self) -> List[StepCalibrator]:
        """f_k = 3 g_k, so that (1/3) sum f_k(p_k/eps) >= 1 is the rejection rule (K = 3)"""
        if self.K != 3:
            raise RangeError("Step calibrators are defined for the K = 3 fixture only")
        edges = [float(e) for e in PRIME3_EDGES]
        return [StepCalibrator(f"prime-g{k + 1}", 3, edges, [3 * float(v) for v in steps])
                for k, steps in enumerate(PRIME3_STEPS)]

    def rejects(self, values: np.ndarray, eps: Fraction) -> bool:
        """Exact rejection test at level eps (K = 3)"""
        total = sum(_step_value(steps, Fraction(float(p)) / eps)
                    for steps, p in zip(PRIME3_STEPS, values))
        return total >= 1

    def merge(self, p: PVectorLike) -> float:
        """
        Merged p-value, in the original (unsorted) input order

        Raises:
            RangeError: If the vector length differs from K
        """
        p = validate_pvector(p)
        if p.K != self.K:
            raise RangeError(f"{self.name} takes {self.K} p-values, got {p.K}")
        values = np.minimum(p.values, 1.0)
        if p.min == 0.0:
            return 0.0
        if self.K == 2:
            return float(min(3.0 * values[0], 1.5 * values[1], 1.0))

        candidates = sorted({Fraction(float(x)) / edge for x in values for edge in PRIME3_EDGES})
        for eps in candidates:
            if eps > 1:
                break
            if self.rejects(values, eps):
                return float(eps)
        return 1.0

    def merge_binary(self, p: PVectorLike, M: Optional[int] = None) -> MergeResult:
        """The K = 3 value by the weighted induced binary search"""
        return merge_weighted_induced(p, self.calibrators(), WeightVector.uniform(3), M)

    def __call__(self, p: PVectorLike) -> float:
        return self.merge(p)


def prime_counterexample(K: int) -> PrimeCounterexample:
    """
    Non-symmetric merging function strictly dominating H*_K, K in {2, 3}

    Raises:
        RangeError: For any other K
    """
    return PrimeCounterexample(K)
