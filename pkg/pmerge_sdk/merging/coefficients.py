"""
Solver for the M-family coefficients c_r, d_r and b_{r,K}
"""

import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from ..cache.coefficient_cache import CoefficientCache, get_default_cache
from ..models.base_models import MCoefficients, ConvergenceError, RangeError
from config.settings import get_solver_config

logger = logging.getLogger(__name__)


def precise_threshold(K: int) -> float:
    """Exponent 1/(K-1) above which c_r = 0 and b_{r,K} has a closed form"""
    return math.inf if K <= 1 else 1.0 / (K - 1)


def equation_branch(r: float) -> str:
    """Name of the root equation used for exponent r"""
    snap = get_solver_config()["branch_snap"]
    if abs(r + 1.0) <= snap:
        return "harmonic"
    if abs(r) <= snap:
        return "geometric"
    return "generic"


def _log_abs_diff_exp(a: float, b: float) -> float:
    """log |e^a - e^b|"""
    hi, gap = max(a, b), abs(a - b)
    if gap == 0.0:
        return -math.inf
    return hi + math.log(-math.expm1(-gap))


def root_log_ratio(r: float, K: int, c: float) -> float:
    """
    log(LHS) - log(RHS) of the defining equation of c_r at c in (0, 1/K)

    Both sides are positive on (0, 1/K), so the log ratio changes sign
    exactly at the root.
    """
    d = 1.0 - (K - 1) * c
    log_c, log_d = math.log(c), math.log(d)
    log_one_minus_Kc = math.log1p(-K * c)
    branch = equation_branch(r)

    if branch == "harmonic":
        log_lhs = log_one_minus_Kc - math.log(K * c) - log_d
        log_rhs = math.log(log_d - log_c)
    elif branch == "geometric":
        log_lhs = math.log(K) + log_one_minus_Kc
        log_rhs = math.log(log_d - log_c)
    else:
        log_lhs = np.logaddexp(math.log(K - 1) + r * log_d, r * log_c)
        log_num = _log_abs_diff_exp((r + 1.0) * log_d, (r + 1.0) * log_c)
        log_rhs = math.log(K) + log_num - math.log(abs(r + 1.0)) - log_one_minus_Kc
    return float(log_lhs - log_rhs)


def log_power_mean_cd(r: float, K: int, c: float, d: float) -> float:
    """log M_{r,K}(c, d, ..., d) with K-1 copies of d"""
    if K == 1:
        return math.log(c)
    if equation_branch(r) == "geometric":
        return (math.log(c) + (K - 1) * math.log(d)) / K
    log_sum = np.logaddexp(r * math.log(c), math.log(K - 1) + r * math.log(d))
    return float((log_sum - math.log(K)) / r)


def _scan_for_bracket(h: Callable[[float], float], K: int, eps: float, points: int):
    """First sign change of h on a deterministic grid over (0, 1/K)"""
    upper = 1.0 / K
    grid = np.geomspace(eps, upper * (1.0 - 1e-3), points)
    tail = upper * (1.0 - np.logspace(-4, -9, 6))
    grid = np.concatenate([grid, tail])
    grid = grid[grid < upper - eps]

    prev_c, prev_h = None, None
    for c in grid:
        value = h(float(c))
        if not math.isfinite(value):
            continue
        if value == 0.0:
            return float(c), float(c)
        if prev_h is not None and (value > 0) != (prev_h > 0):
            return prev_c, float(c)
        prev_c, prev_h = float(c), value
    return None


def _solve_root(r: float, K: int) -> MCoefficients:
    solver_config = get_solver_config()
    h = lambda c: root_log_ratio(r, K, c)

    bracket = _scan_for_bracket(h, K, solver_config["bracket_eps"], solver_config["scan_points"])
    if bracket is None:
        raise ConvergenceError(f"Could not bracket c_r for r={r!r}, K={K}", {"r": r, "K": K})

    lo, hi = bracket
    if lo == hi:
        c = lo
    else:
        try:
            c = optimize.bisect(h, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                maxiter=solver_config["max_iterations"])
        except (RuntimeError, ValueError) as e:
            raise ConvergenceError(f"Bisection for c_r failed (r={r!r}, K={K}): {e}",
                                   {"r": r, "K": K, "bracket": (lo, hi)})

    residual = abs(h(c))
    if residual > solver_config["residual_tolerance"]:
        logger.warning(f"c_r residual {residual:.3e} above tolerance for r={r}, K={K}")

    d = 1.0 - (K - 1) * c
    b = math.exp(-log_power_mean_cd(r, K, c, d))
    logger.debug(f"Solved c_r={c!r}, b={b!r} for r={r}, K={K} (residual {residual:.2e})")
    return MCoefficients(r=r, K=K, c_r=c, d_r=d, b_rK=b, residual=residual,
                         branch=equation_branch(r))


def _solve(r: float, K: int) -> MCoefficients:
    r = float(r)
    if math.isnan(r):
        raise RangeError("Exponent r must not be NaN")
    if K < 1:
        raise RangeError(f"K must be positive, got {K}")

    if K == 1:
        return MCoefficients(r=r, K=1, c_r=1.0, d_r=1.0, b_rK=1.0, branch="identity")
    if r == -math.inf:
        return MCoefficients(r=r, K=K, c_r=1.0 / K, d_r=1.0 / K, b_rK=float(K), branch="minimum")
    if r == math.inf:
        return MCoefficients(r=r, K=K, c_r=0.0, d_r=1.0, b_rK=1.0, branch="maximum")

    if r >= precise_threshold(K):
        b = min(r + 1.0, float(K)) ** (1.0 / r)
        return MCoefficients(r=r, K=K, c_r=0.0, d_r=1.0, b_rK=b, branch="closed_form")

    if K == 2:
        # the breakpoints collapse onto 1/2
        return MCoefficients(r=r, K=2, c_r=0.5, d_r=0.5, b_rK=2.0, branch="two_inputs")

    return _solve_root(r, K)


def solve_m_coefficients(r: float, K: int,
                         cache: Optional[CoefficientCache] = None) -> MCoefficients:
    """
    Solve (c_r, d_r, b_{r,K}) for the M-family with exponent r and K inputs

    For r >= 1/(K-1): c_r = 0 and b = ((r+1) ^ K)^(1/r). For r < 1/(K-1) and
    K >= 3, c_r is the unique root in (0, 1/K) of the branch equation (generic,
    r = -1 or r = 0), found by a sign-change scan followed by bisection, and
    b = 1 / M_{r,K}(c_r, d_r, ..., d_r). For K = 2 and r < 1, b = 2.

    Args:
        r: Exponent in [-inf, inf]
        K: Number of inputs
        cache: Coefficient memo (process-wide cache if not provided)

    Returns:
        MCoefficients

    Raises:
        ConvergenceError: If the root cannot be bracketed or bisection fails
        RangeError: If r is NaN or K < 1
    """
    cache = cache or get_default_cache()
    return cache.get_or_solve(float(r), int(K), _solve)
