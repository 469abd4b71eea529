"""
Classic p-merging families: Bonferroni, Simes, Hommel, O-family and M-family
"""

import logging
import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from ..core.pvector import validate_pvector, PVectorLike
from ..models.base_models import MCoefficients, PVector, RangeError
from .coefficients import solve_m_coefficients

logger = logging.getLogger(__name__)


@lru_cache(maxsize=16)
def _harmonic_table(n: int) -> np.ndarray:
    table = np.cumsum(1.0 / np.arange(1, n + 1, dtype=np.longdouble)).astype(float)
    table.setflags(write=False)
    return table


def harmonic_numbers(n: int) -> np.ndarray:
    """Array (l_1, ..., l_n) of harmonic numbers l_m = sum_{k<=m} 1/k"""
    if n < 1:
        return np.empty(0)
    # a longer table has identical prefixes, so reuse the next power of two
    size = 1 << max(0, (n - 1).bit_length())
    return _harmonic_table(size)[:n]


def harmonic_number(K: int) -> float:
    """l_K = 1 + 1/2 + ... + 1/K"""
    return float(harmonic_numbers(K)[K - 1])


def bonferroni(p: PVectorLike) -> float:
    """K min(p) ^ 1"""
    p = validate_pvector(p)
    return min(p.K * p.min, 1.0)


def o_family(p: PVectorLike, k: int) -> float:
    """
    Order-statistic merger G_{k,K}(p) = (K/k) p_(k) ^ 1

    Raises:
        RangeError: If k is outside 1..K
    """
    p = validate_pvector(p)
    if not 1 <= k <= p.K:
        raise RangeError(f"O-family index k={k} outside 1..{p.K}", {"k": k, "K": p.K})
    return min(p.K / k * p.order_stat(k), 1.0)


def simes_statistic(sorted_values: np.ndarray) -> float:
    """min_k (K/k) p_(k) on an ascending array, without clamping"""
    K = sorted_values.size
    return float(K * np.min(sorted_values / np.arange(1, K + 1)))


def simes(p: PVectorLike) -> float:
    """
    Simes function S_K(p) = min_k (K/k) p_(k) ^ 1

    Not a valid p-merging function under arbitrary dependence; it is the
    pointwise minimum of all symmetric ones and serves as a benchmark.
    """
    p = validate_pvector(p)
    return min(simes_statistic(p.sorted_view), 1.0)


def hommel(p: PVectorLike) -> float:
    """Hommel's function H_K(p) = l_K S_K(p) ^ 1"""
    p = validate_pvector(p)
    return min(harmonic_number(p.K) * simes_statistic(p.sorted_view), 1.0)


def power_mean(p: Union[PVector, np.ndarray], r: float) -> float:
    """
    Power mean M_r = ((p_1^r + ... + p_K^r)/K)^(1/r)

    Limits: r = 0 geometric mean, r = -inf minimum, r = +inf maximum. For
    r <= 0 any zero entry gives 0. Entries are rescaled by the extreme value
    before powering and summed in ascending order in extended precision.
    """
    values = p.sorted_view if isinstance(p, PVector) else np.sort(np.asarray(p, dtype=float))
    if values.size == 0:
        raise RangeError("Power mean of an empty vector")

    if r == -math.inf:
        return float(np.min(values))
    if r == math.inf:
        return float(np.max(values))

    lo = float(np.min(values))
    if r <= 0 and lo == 0.0:
        return 0.0
    if r == 0:
        return float(np.exp(np.mean(np.log(values))))

    scale = lo if r < 0 else float(np.max(values))
    if scale == 0.0:
        return 0.0
    ratios = (values / scale).astype(np.longdouble)
    mean = np.sum(ratios ** r) / values.size
    return float(scale * mean ** (1.0 / r))


def m_family(p: PVectorLike, r: float, coeffs: Optional[MCoefficients] = None) -> float:
    """
    M-family merger F_{r,K}(p) = b_{r,K} M_{r,K}(p) ^ 1

    Args:
        p: Input vector
        r: Exponent in [-inf, inf]
        coeffs: Coefficients for (r, K) (solved on demand if not provided)

    Raises:
        RangeError: If coeffs were solved for a different (r, K)
    """
    p = validate_pvector(p)
    if coeffs is None:
        coeffs = solve_m_coefficients(r, p.K)
    elif not coeffs.matches(r, p.K):
        raise RangeError(f"Coefficients for (r={coeffs.r}, K={coeffs.K}) used with (r={r}, K={p.K})")
    if p.K == 2 and r < 1:
        logger.debug("Two-input M-family with r < 1 is strictly dominated by Bonferroni")
    return min(coeffs.b_rK * power_mean(p, r), 1.0)
