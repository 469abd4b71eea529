"""
Weighted p-to-e merging and the naive detour through e-values
"""

import logging
import math
from typing import Sequence, Union

from ..core.pvector import validate_pvector, PVectorLike
from ..models.base_models import LengthError, WeightVector
from .base import Calibrator

logger = logging.getLogger(__name__)

Calibrators = Union[Calibrator, Sequence[Calibrator]]


def _expand(fs: Calibrators, K: int) -> Sequence[Calibrator]:
    if isinstance(fs, Calibrator):
        return [fs] * K
    if len(fs) != K:
        raise LengthError(f"Expected {K} calibrators, got {len(fs)}")
    return fs


def p_to_e_merge(p: PVectorLike, fs: Calibrators, w: WeightVector = None) -> float:
    """
    lambda_1 f_1(p_1) + ... + lambda_K f_K(p_K), saturating at +inf

    Terms with zero weight are dropped, so 0 * inf never arises.

    Args:
        p: Input vector
        fs: One calibrator per entry, or a single calibrator used for all
        w: Weights on the simplex (uniform if not provided)

    Raises:
        LengthError: If the lengths of p, fs and w disagree
    """
    p = validate_pvector(p)
    w = w or WeightVector.uniform(p.K)
    if w.K != p.K:
        raise LengthError(f"Weight vector has {w.K} entries for K={p.K}")

    terms = []
    for lam, f, x in zip(w.lambdas, _expand(fs, p.K), p.values):
        if lam == 0.0:
            continue
        value = f(float(x))
        if value == math.inf:
            return math.inf
        terms.append(lam * value)
    return math.fsum(terms)


def naive_detour_merge(p: PVectorLike, fs: Calibrators, w: WeightVector = None) -> float:
    """1 / p_to_e_merge(p) capped at 1, with 1/inf = 0"""
    e = p_to_e_merge(p, fs, w)
    if e == math.inf:
        return 0.0
    if e <= 1.0:
        return 1.0
    return 1.0 / e
