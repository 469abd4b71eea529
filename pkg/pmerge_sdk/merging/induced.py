"""
Calibrator-induced merging: binary search, exact grid harmonic and closed-form F*_{r,K}
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..calibrators.base import Calibrator
from ..calibrators.families import grid_harmonic_calibrator
from ..core.pvector import validate_pvector, PVectorLike
from ..models.base_models import (
    LengthError,
    MCoefficients,
    MergeResult,
    RangeError,
    WeightVector,
)
from .classic import m_family
from .coefficients import solve_m_coefficients, precise_threshold, equation_branch
from config.settings import get_solver_config

logger = logging.getLogger(__name__)

# relative slack on the rejection test sum f(p_k/eps) >= K, absorbing rounding of exact ties
REJECTION_SLACK = 1e-12


@dataclass(frozen=True)
class InducedMerge:
    """Merging function induced by a calibrator, evaluated by binary search of depth M"""
    calibrator: Calibrator
    K: int
    M: int = 52

    def __post_init__(self):
        """Validate depth and arity"""
        if self.M < 1:
            raise RangeError(f"Binary-search depth must be >= 1, got {self.M}")
        if self.calibrator.K is not None and self.calibrator.K != self.K:
            raise RangeError(f"Calibrator built for K={self.calibrator.K}, merge uses K={self.K}")

    @property
    def tag(self) -> str:
        return f"induced:{self.calibrator.name}:M={self.M}"


def rejection_score(f: Calibrator, values: np.ndarray, eps: float) -> float:
    """phi_p(eps) = (1/K) sum_k f(p_k / eps); nondecreasing in eps"""
    return float(np.sum(f(values / eps))) / values.size


def rejects_at(f: Calibrator, values: np.ndarray, eps: float) -> bool:
    """Whether p lies in the rejection region at level eps: (1/K) sum f(p_k/eps) >= 1"""
    if np.min(values) == 0.0:
        return True
    return rejection_score(f, values, eps) >= 1.0 - REJECTION_SLACK


def _binary_search(accepts, depth: int) -> float:
    low, high = 0.0, 1.0
    for _ in range(depth):
        mid = 0.5 * (low + high)
        if accepts(mid):
            high = mid
        else:
            low = mid
    return high


def merge_induced(p: PVectorLike, im: InducedMerge) -> MergeResult:
    """
    Merged p-value of the calibrator-induced merging function

    Bisects eps in [0, 1] M times, keeping the right end R whenever
    (1/K) sum f(p_k/eps) >= 1 holds at the midpoint. R exceeds the exact
    induced value by at most 2^-M and is always a valid p-value.

    Args:
        p: Input vector
        im: Calibrator, arity and depth

    Returns:
        MergeResult with accuracy_bound 2^-M (0 if some p_k = 0)

    Raises:
        LengthError: If p does not have im.K entries
    """
    p = validate_pvector(p)
    if p.K != im.K:
        raise LengthError(f"Induced merge built for K={im.K}, got {p.K} p-values")
    if p.min == 0.0:
        return MergeResult(0.0, im.tag, 0.0)

    values = np.minimum(p.sorted_view, 1.0)
    result = _binary_search(lambda eps: rejects_at(im.calibrator, values, eps), im.M)
    return MergeResult(result, im.tag, math.ldexp(1.0, -im.M))


def merge_weighted_induced(p: PVectorLike, fs: Sequence[Calibrator], w: WeightVector = None,
                           M: int = None) -> MergeResult:
    """
    Non-symmetric induced merge inf{eps : sum_k lambda_k f_k(p_k/eps) >= 1}

    Same binary search and accuracy contract as merge_induced.

    Raises:
        LengthError: If the number of calibrators or weights differs from K
    """
    p = validate_pvector(p)
    depth = M or get_solver_config()["induced_depth"]
    w = w or WeightVector.uniform(p.K)
    if len(fs) != p.K or w.K != p.K:
        raise LengthError(f"Need {p.K} calibrators and weights, got {len(fs)} and {w.K}")
    tag = f"weighted-induced:M={depth}"
    if p.min == 0.0:
        return MergeResult(0.0, tag, 0.0)

    values = np.minimum(p.values, 1.0)

    def accepts(eps: float) -> bool:
        total = math.fsum(lam * f(x / eps) for lam, f, x in zip(w.lambdas, fs, values) if lam > 0)
        return total >= 1.0 - REJECTION_SLACK

    return MergeResult(_binary_search(accepts, depth), tag, math.ldexp(1.0, -depth))


def grid_harmonic_exact(p: PVectorLike) -> float:
    """
    H*_K by search over the candidate thresholds eps = K l_K p_j / i

    The rejection score is a right-continuous step function of eps whose
    jumps sit at these candidates, so the smallest rejecting candidate is the
    exact merged value. Candidates are sorted and searched by bisection.
    """
    p = validate_pvector(p)
    if p.min == 0.0:
        return 0.0

    f = grid_harmonic_calibrator(p.K)
    values = np.minimum(p.sorted_view, 1.0)
    i = np.arange(1, p.K + 1, dtype=float)
    candidates = np.unique(np.outer(f.grid_scale * np.unique(values), 1.0 / i).ravel())
    candidates = candidates[candidates <= 1.0]

    low, high = 0, candidates.size
    while low < high:
        mid = (low + high) // 2
        if rejects_at(f, values, float(candidates[mid])):
            high = mid
        else:
            low = mid + 1
    if low == candidates.size:
        return 1.0
    return float(candidates[low])


def grid_harmonic(p: PVectorLike) -> float:
    """
    Grid harmonic merging function H*_K

    Exact candidate search up to K = exact_grid_limit, the binary-search
    merge with the configured depth above it.
    """
    p = validate_pvector(p)
    solver_config = get_solver_config()
    if p.K <= solver_config["exact_grid_limit"]:
        return grid_harmonic_exact(p)
    im = InducedMerge(grid_harmonic_calibrator(p.K), p.K, solver_config["induced_depth"])
    return merge_induced(p, im).p


def _log_prefix_power_sums(sorted_values: np.ndarray, r: float) -> np.ndarray:
    """log sum_{i<=m} s_i^r for m = 1..n on an ascending positive array"""
    if equation_branch(r) == "geometric":
        return np.cumsum(np.log(sorted_values.astype(np.longdouble)))
    scale = sorted_values[0] if r < 0 else sorted_values[-1]
    ratios = (sorted_values / scale).astype(np.longdouble)
    return r * np.log(np.longdouble(scale)) + np.log(np.cumsum(ratios ** r))


def m_star_sorted(sorted_values: np.ndarray, r: float, coeffs: MCoefficients) -> float:
    """
    F*_{r,K} on an ascending array of positive values clipped at 1, before the final ^ 1

    For r < 1/(K-1): min_m M_{r,m}(p_m) / M_{r,m}(c_r, d_r, ..., d_r); for
    1/(K-1) <= r < K-1: min_m M_{r,m}(p_m) / (1 - rK/((r+1)m))_+ with
    x/0 = inf. Prefix power sums are formed once, in log space.
    """
    K = sorted_values.size
    m = np.arange(1, K + 1, dtype=np.longdouble)
    log_sums = _log_prefix_power_sums(sorted_values, r)
    geometric = equation_branch(r) == "geometric"

    if r < precise_threshold(K):
        log_c, log_d = math.log(coeffs.c_r), math.log(coeffs.d_r)
        if geometric:
            log_ratio = (log_sums - log_c - (m - 1) * log_d) / m
        else:
            with np.errstate(divide="ignore"):
                log_copies = np.log(m - 1)
            log_ref = np.logaddexp(np.longdouble(r * log_c), log_copies + np.longdouble(r * log_d))
            log_ratio = (log_sums - log_ref) / r
        return float(np.exp(np.min(log_ratio)))

    denominators = 1.0 - r * K / ((r + 1.0) * m)
    positive = denominators > 0
    log_means = (log_sums[positive] - np.log(m[positive])) / r
    return float(np.exp(np.min(log_means - np.log(denominators[positive]))))


def m_star(p: PVectorLike, r: float, coeffs: Optional[MCoefficients] = None) -> float:
    """
    Admissible improvement F*_{r,K} of the M-family, computed from prefix power sums

    Args:
        p: Input vector
        r: Exponent, r < K-1
        coeffs: Coefficients for (r, K) (solved on demand if not provided)

    Raises:
        RangeError: If K < 3 or r >= K-1, or coeffs were solved for a different (r, K)
    """
    p = validate_pvector(p)
    K = p.K
    if K < 3:
        raise RangeError(f"F*_(r,K) needs K >= 3, got {K}")
    if not r < K - 1:
        raise RangeError(f"F*_(r,K) needs r < K-1 = {K - 1}, got r={r}")
    if coeffs is None:
        coeffs = solve_m_coefficients(r, K)
    elif not coeffs.matches(r, K):
        raise RangeError(f"Coefficients for (r={coeffs.r}, K={coeffs.K}) used with (r={r}, K={K})")

    if p.min == 0.0:
        return 0.0
    value = m_star_sorted(np.minimum(p.sorted_view, 1.0), float(r), coeffs)
    return min(value, 1.0)


def m_star_equivalence_check(p: PVectorLike, r: float, eps: float,
                             coeffs: Optional[MCoefficients] = None) -> bool:
    """
    Check F*_{r,K}(p) <= eps  <=>  F_{r,K}(p ^ eps d_r) <= eps or min(p) = 0

    Raises:
        RangeError: If eps is outside (0, 1)
    """
    if not 0.0 < eps < 1.0:
        raise RangeError(f"eps must lie in (0, 1), got {eps!r}")
    p = validate_pvector(p)
    coeffs = coeffs or solve_m_coefficients(r, p.K)

    left = m_star(p, r, coeffs) <= eps
    if p.min == 0.0:
        right = True
    else:
        capped = np.minimum(p.values, eps * coeffs.d_r)
        right = m_family(capped, r, coeffs) <= eps
    if left != right:
        logger.debug(f"Equivalence fails at eps={eps!r}, r={r}: F* side {left}, F side {right}")
    return left == right
