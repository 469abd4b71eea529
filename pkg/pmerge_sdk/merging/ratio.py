"""
Magnitude of improvement of the admissible mergers over Hommel and the harmonic-mean merger
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
from dataclasses_json import dataclass_json

from ..models.base_models import RangeError
from .classic import harmonic_number, hommel, m_family
from .coefficients import solve_m_coefficients
from .induced import grid_harmonic, m_star

logger = logging.getLogger(__name__)


@dataclass_json
@dataclass
class ImprovementWitness:
    """Input vector at which an improvement ratio is evaluated, with the attained ratio and its bound"""
    K: int
    p: List[float] = field(default_factory=list)
    ratio: float = 1.0
    bound: float = 1.0


def _grid_sum_at_least_one(K: int, k: int, m: int) -> bool:
    """sum_{j: t >= j/K} 1/ceil(j/t) >= 1 at t = k/m, in integer arithmetic"""
    j = np.arange(1, K + 1, dtype=np.int64)
    active = j[j * m <= k * K]
    if active.size == 0:
        return False
    ceilings = -(-(active * m) // k)
    total = math.fsum(1.0 / ceilings)
    if abs(total - 1.0) < 1e-9:
        return sum(Fraction(1, int(c)) for c in ceilings) >= 1
    return total >= 1.0


def gamma_K(K: int) -> float:
    """
    gamma_K = min{t > 0 : sum_k 1{t >= k/K} / ceil(k/t) >= 1}

    The sum is a nondecreasing step function of t whose jumps lie at the
    rationals k/m with k <= m <= K, so the minimum is found by bisection
    over those candidates with an exact membership test.

    Raises:
        RangeError: If K < 2
    """
    if K < 2:
        raise RangeError(f"gamma_K needs K >= 2, got {K}")

    ks, ms = np.meshgrid(np.arange(1, K + 1), np.arange(1, K + 1), indexing="ij")
    keep = ks <= ms
    ks, ms = ks[keep], ms[keep]
    values, first = np.unique(ks / ms, return_index=True)

    low, high = 0, values.size - 1
    while low < high:
        mid = (low + high) // 2
        if _grid_sum_at_least_one(K, int(ks[first[mid]]), int(ms[first[mid]])):
            high = mid
        else:
            low = mid + 1

    result = float(values[low])
    logger.debug(f"gamma_{K} = {ks[first[low]]}/{ms[first[low]]} = {result!r}")
    return result


def gamma_bounds(K: int) -> Tuple[float, float]:
    """Interval [floor(log K - log log K), l_K] containing 1/gamma_K"""
    if K < 2:
        raise RangeError(f"gamma_K needs K >= 2, got {K}")
    lower = math.floor(math.log(K) - math.log(math.log(K)))
    return float(lower), harmonic_number(K)


def hommel_improvement_witness(K: int, alpha: Optional[float] = None) -> ImprovementWitness:
    """
    H*_K / H_K at p = (alpha, 2 alpha, ..., K alpha), where the ratio equals gamma_K

    alpha defaults to min(0.01, 1/(K l_K)) so that H_K(p) <= 1.
    """
    if alpha is None:
        alpha = min(0.01, 1.0 / (K * harmonic_number(K)))
    p = alpha * np.arange(1, K + 1, dtype=float)
    ratio = grid_harmonic(p) / hommel(p)
    return ImprovementWitness(K, p.tolist(), ratio, gamma_K(K))


def improvement_ratio_mstar(K: int) -> float:
    """
    inf over p of F*_{-1,K}(p) / F_{-1,K}(p), equal to d_{-1} = 1 - (K-1) c_{-1}

    Raises:
        RangeError: If K < 3
    """
    if K < 3:
        raise RangeError(f"Improvement ratio of F*_(-1,K) needs K >= 3, got {K}")
    return solve_m_coefficients(-1.0, K).d_r


def mstar_ratio_witness(K: int, eps: float = 1e-6) -> ImprovementWitness:
    """F*_{-1,K} / F_{-1,K} at p = (eps, 1, ..., 1), approaching the infimum as eps -> 0"""
    coeffs = solve_m_coefficients(-1.0, K)
    p = np.ones(K)
    p[0] = eps
    ratio = m_star(p, -1.0, coeffs) / m_family(p, -1.0, coeffs)
    return ImprovementWitness(K, p.tolist(), ratio, improvement_ratio_mstar(K))
