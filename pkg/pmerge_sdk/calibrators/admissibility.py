"""
Sufficient admissibility condition for calibrator-induced merging functions
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from dataclasses_json import dataclass_json

from .base import Calibrator, ConvexityClass
from config.settings import get_solver_config

logger = logging.getLogger(__name__)

PLATEAU_SAMPLES = 64
STRICT_CLASSES = (ConvexityClass.STRICTLY_CONVEX, ConvexityClass.STRICTLY_CONCAVE)


@dataclass_json
@dataclass
class AdmissibilityReport:
    """Outcome of the admissibility condition check; witnesses lists the failed clauses"""
    satisfied: bool
    eta: float
    witnesses: List[str] = field(default_factory=list)
    calibrator: str = ""


def _second_differences(f: Calibrator, eta: float, tau: float, grid_size: int) -> np.ndarray:
    grid = eta + (tau - eta) * np.arange(0, grid_size + 1) / grid_size
    values = f(grid)
    return values[:-2] - 2.0 * values[1:-1] + values[2:]


def check_admissibility_condition(f: Calibrator, K: Optional[int] = None) -> AdmissibilityReport:
    """
    Check that f is K on (0, eta], jumps into (K/(K-1), K] right after eta,
    is strictly convex or strictly concave on (eta, tau] and vanishes at 1

    tau = 1 - (K-1) eta. The declared convexity class decides the shape
    clause; second differences on a grid of (eta, tau] are a cross-check
    that records a witness when they contradict the declared class.

    Args:
        f: Calibrator with declared eta and convexity class
        K: Number of inputs (defaults to f.K)

    Returns:
        AdmissibilityReport
    """
    solver_config = get_solver_config()
    K = K or f.K
    eta = float(f.eta or 0.0)
    witnesses = []

    if not 0.0 <= eta < 1.0 / K:
        witnesses.append(f"eta={eta!r} outside [0, 1/K)")
        return AdmissibilityReport(False, eta, witnesses, f.name)
    tau = 1.0 - (K - 1) * eta

    if eta > 0:
        plateau = f(eta * np.arange(1, PLATEAU_SAMPLES + 1) / PLATEAU_SAMPLES)
        off = np.flatnonzero(np.abs(plateau - K) > 1e-9 * K)
        if off.size:
            x = eta * (off[0] + 1) / PLATEAU_SAMPLES
            witnesses.append(f"plateau: f({x!r})={plateau[off[0]]!r} != K")

    right_value = f(eta + 1e-12 * max(1.0, eta))
    if not K / (K - 1) < right_value <= K * (1 + 1e-12):
        witnesses.append(f"jump: f(eta+)={right_value!r} outside (K/(K-1), K]")

    if f.convexity_class not in STRICT_CLASSES:
        witnesses.append(f"shape: declared {f.convexity_class.value} on (eta, tau]")
    else:
        d2 = _second_differences(f, eta, tau, solver_config["convexity_grid"])
        threshold = solver_config["convexity_threshold"]
        if f.convexity_class == ConvexityClass.STRICTLY_CONVEX:
            contradicted = np.any(d2 < -threshold)
        else:
            contradicted = np.any(d2 > threshold)
        if contradicted:
            witnesses.append(f"shape: second differences contradict {f.convexity_class.value}")

    at_one = f(1.0)
    if at_one != 0.0:
        witnesses.append(f"f(1)={at_one!r} != 0")

    report = AdmissibilityReport(not witnesses, eta, witnesses, f.name)
    logger.debug(f"Admissibility check for {f.name}, K={K}: {report.satisfied} {witnesses}")
    return report
