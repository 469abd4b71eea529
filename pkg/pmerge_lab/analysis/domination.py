"""
Domination between scaled power means and between members of the M-family
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
from dataclasses_json import dataclass_json

from pmerge_sdk.merging import power_mean, solve_m_coefficients
from pmerge_sdk.models.base_models import RangeError

logger = logging.getLogger(__name__)

WITNESS_MARGIN = 1e-12
GRID_LEVELS = (0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)
TENSOR_GRID_MAX_K = 4

Merger = Callable[[np.ndarray], float]


class Relation(str, Enum):
    FIRST_DOMINATES = "first_dominates"
    SECOND_DOMINATES = "second_dominates"
    INCOMPARABLE = "incomparable"


@dataclass_json
@dataclass
class DominationVerdict:
    """
    Relation between two merging functions with numerical witnesses

    For a domination, witness holds a vector where the dominating function is
    strictly smaller; for incomparable functions it holds one vector for each
    direction (first smaller, then second smaller).
    """
    relation: str
    witness: List[List[float]] = field(default_factory=list)


def witness_grid(K: int) -> List[np.ndarray]:
    """
    Fixed set of test vectors

    Tensor products of the grid levels for K <= 4, two-level vectors
    (x, y, ..., y) and (x, ..., x, y) for every K, and the limit shapes
    (1, 0, ..., 0), (0, 1, ..., 1), (1, 1/e, ..., 1/e) and (e^K, 1, ..., 1).
    """
    vectors = []
    if K <= TENSOR_GRID_MAX_K:
        vectors.extend(np.array(v) for v in itertools.product(GRID_LEVELS, repeat=K))
    for x, y in itertools.product(GRID_LEVELS, repeat=2):
        head = np.full(K, y)
        head[0] = x
        tail = np.full(K, x)
        tail[-1] = y
        vectors.extend((head, tail))
    for e in (1e-2, 1e-4, 1e-6):
        spread = np.full(K, 1.0 / e)
        spread[0] = 1.0
        tiny = np.ones(K)
        tiny[0] = e ** K
        vectors.extend((spread, tiny))
    corner = np.zeros(K)
    corner[0] = 1.0
    vectors.extend((corner, 1.0 - corner))
    return vectors


def _find_witness(smaller: Merger, larger: Merger, K: int) -> Optional[List[float]]:
    """Grid vector where smaller(p) < larger(p) by the largest margin, if any exceeds the threshold"""
    best, best_gap = None, WITNESS_MARGIN
    for p in witness_grid(K):
        gap = larger(p) - smaller(p)
        if gap > best_gap:
            best, best_gap = p, gap
    return best.tolist() if best is not None else None


def _verdict(relation: Relation, first: Merger, second: Merger, K: int) -> DominationVerdict:
    if relation == Relation.FIRST_DOMINATES:
        directions = [(first, second)]
    elif relation == Relation.SECOND_DOMINATES:
        directions = [(second, first)]
    else:
        directions = [(first, second), (second, first)]

    witnesses = []
    for smaller, larger in directions:
        witness = _find_witness(smaller, larger, K)
        if witness is None:
            logger.warning(f"No grid witness found for {relation.value} with K={K}")
        else:
            witnesses.append(witness)
    return DominationVerdict(relation.value, witnesses)


def _scale_at_corner(r: float) -> float:
    """Exponent of K in K^{-1/r} (0 for infinite r)"""
    return 0.0 if math.isinf(r) else -1.0 / r


def m_scaled_domination(r: float, a: float, s: float, b: float, K: int) -> DominationVerdict:
    """
    Compare a M_{r,K} (first) with b M_{s,K} (second), r < s

    a M_r dominates b M_s iff a <= b; b M_s dominates a M_r iff rs > 0 and
    a K^{-1/r} >= b K^{-1/s}. Domination means pointwise <=.

    Raises:
        RangeError: If r >= s, a or b is not positive, or K < 2
    """
    if not r < s:
        raise RangeError(f"Need r < s, got r={r}, s={s}")
    if a <= 0 or b <= 0:
        raise RangeError(f"Scale factors must be positive, got a={a}, b={b}")
    if K < 2:
        raise RangeError(f"Need K >= 2, got {K}")

    log_first = math.log(a) + _scale_at_corner(r) * math.log(K)
    log_second = math.log(b) + _scale_at_corner(s) * math.log(K)
    if a <= b:
        relation = Relation.FIRST_DOMINATES
    elif r * s > 0 and log_first >= log_second:
        relation = Relation.SECOND_DOMINATES
    else:
        relation = Relation.INCOMPARABLE

    def first(p: np.ndarray) -> float:
        return a * power_mean(p, r)

    def second(p: np.ndarray) -> float:
        return b * power_mean(p, s)

    logger.debug(f"{a} M_{r} vs {b} M_{s} (K={K}): {relation.value}")
    return _verdict(relation, first, second, K)


def _dominated_by(r: float, s: float, K: int) -> bool:
    """Whether F_{r,K} is dominated by F_{s,K}"""
    if K == 2:
        return 1 <= r < s or s < r <= 1
    return K - 1 <= r < s


def m_family_domination(r: float, s: float, K: int) -> DominationVerdict:
    """
    Compare F_{r,K} (first) with F_{s,K} (second)

    For K >= 3, F_r is dominated by F_s iff K-1 <= r < s; for K = 2, iff
    1 <= r < s or s < r <= 1. The functions are compared without the cap at 1.

    Raises:
        RangeError: If r == s or K < 2
    """
    if r == s:
        raise RangeError(f"Need r != s, got r = s = {r}")
    if K < 2:
        raise RangeError(f"Need K >= 2, got {K}")

    if _dominated_by(r, s, K):
        relation = Relation.SECOND_DOMINATES
    elif _dominated_by(s, r, K):
        relation = Relation.FIRST_DOMINATES
    else:
        relation = Relation.INCOMPARABLE

    b_r = solve_m_coefficients(r, K).b_rK
    b_s = solve_m_coefficients(s, K).b_rK

    def first(p: np.ndarray) -> float:
        return b_r * power_mean(p, r)

    def second(p: np.ndarray) -> float:
        return b_s * power_mean(p, s)

    logger.debug(f"F_{r} vs F_{s} (K={K}): {relation.value}")
    return _verdict(relation, first, second, K)
