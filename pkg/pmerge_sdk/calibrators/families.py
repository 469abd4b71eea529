"""
Calibrator families: grid harmonic, M*-calibrators, O-family and transforms
"""

import logging
import math
import re
from typing import List, Optional, Tuple

import numpy as np

from ..merging.classic import harmonic_number
from ..merging.coefficients import solve_m_coefficients, precise_threshold, equation_branch
from ..models.base_models import MCoefficients, MethodError, RangeError
from .base import Calibrator, StepCalibrator, ConvexityClass, EDGE_SNAP

logger = logging.getLogger(__name__)


class GridHarmonicCalibrator(StepCalibrator):
    """
    Grid harmonic calibrator f(x) = K 1{l_K x <= 1} / ceil(K l_K x), f(0) = inf

    Steps of width 1/(K l_K) at heights K, K/2, ..., 1; integrates to one.
    """

    def __init__(self, K: int):
        if K < 1:
            raise RangeError(f"Grid harmonic calibrator needs K >= 1, got {K}")
        self.ell = harmonic_number(K)
        self.grid_scale = K * self.ell
        i = np.arange(1, K + 1, dtype=float)
        super().__init__("grid-harmonic", K, i / self.grid_scale, K / i,
                         value_at_zero=math.inf, admissible=True)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        steps = np.ceil(self.grid_scale * x * (1.0 - EDGE_SNAP))
        steps = np.maximum(steps, 1.0)
        return np.where(steps <= self.K, self.K / steps, 0.0)

    def _integrate(self) -> float:
        # every step contributes (1/(K l_K)) (K/i)
        return float(np.sum(1.0 / np.arange(1, self.K + 1, dtype=np.longdouble)) / self.ell)


class OFamilyCalibrator(StepCalibrator):
    """
    (K/k) 1_{(0, k/K]}, inducing the order-statistic merger G_{k,K}

    The admissible version has f(0) = inf and induces the zero-one adjusted
    G_{k,K}; otherwise f(0) = K.
    """

    def __init__(self, k: int, K: int, admissible: bool = False):
        if not 1 <= k <= K:
            raise RangeError(f"O-family calibrator needs 1 <= k <= K, got k={k}, K={K}")
        self.k = k
        super().__init__(f"o:k={k}", K, [k / K], [K / k],
                         value_at_zero=math.inf if admissible else float(K),
                         admissible=admissible)


class MStarCalibrator(Calibrator):
    """
    Calibrator f_r inducing the admissible improvement F*_{r,K} of the M-family

    For r < 1/(K-1): K ((x^r - d^r)/(c^r - d^r) ^ 1)_+ (logarithms for r = 0),
    a plateau at K on (0, c_r] then strictly convex down to 0 at d_r.
    For 1/(K-1) <= r < K-1: ((r+1)/r)(1 - x^r)_+, strictly convex for r < 1,
    linear for r = 1 and strictly concave for r > 1.
    """

    def __init__(self, r: float, K: int, coeffs: Optional[MCoefficients] = None):
        if K < 3:
            raise RangeError(f"M* calibrator needs K >= 3, got {K}")
        if not math.isfinite(r) or r >= K - 1:
            raise RangeError(f"M* calibrator needs finite r < K-1 = {K - 1}, got r={r}")
        coeffs = coeffs or solve_m_coefficients(r, K)
        if not coeffs.matches(r, K):
            raise RangeError(f"Coefficients for (r={coeffs.r}, K={coeffs.K}) used with (r={r}, K={K})")

        self.r = float(r)
        self.coeffs = coeffs
        self.plateau = r < precise_threshold(K)

        if self.plateau:
            convexity = ConvexityClass.STRICTLY_CONVEX
            eta, tau = coeffs.c_r, coeffs.d_r
            self._log_form = equation_branch(r) == "geometric"
            if self._log_form:
                self._lo, self._hi = math.log(coeffs.c_r), math.log(coeffs.d_r)
            else:
                self._lo, self._hi = coeffs.c_r ** r, coeffs.d_r ** r
        else:
            if r < 1:
                convexity = ConvexityClass.STRICTLY_CONVEX
            elif r > 1:
                convexity = ConvexityClass.STRICTLY_CONCAVE
            else:
                convexity = ConvexityClass.OTHER
            eta, tau = 0.0, 1.0

        super().__init__(f"mstar:r={r!r}", K, math.inf, convexity, admissible=True,
                         eta=eta, tau=tau)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        K, r = self.K, self.r
        if not self.plateau:
            return (r + 1.0) / r * np.clip(1.0 - x ** r, 0.0, None)

        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self._log_form:
                ratio = (np.log(x) - self._hi) / (self._lo - self._hi)
            else:
                ratio = (x ** r - self._hi) / (self._lo - self._hi)
        ratio = np.where(x <= self.coeffs.c_r, 1.0, ratio)
        return K * np.clip(ratio, 0.0, 1.0)

    def breakpoints(self) -> List[float]:
        if self.plateau:
            return [self.coeffs.c_r, self.coeffs.d_r]
        return []


class ArithmeticCalibrator(Calibrator):
    """(2 - 2x)_+ for two inputs; induces the zero-one adjusted arithmetic-mean merger 2 M_{1,2}"""

    def __init__(self):
        super().__init__("arithmetic-k2", 2, 2.0, ConvexityClass.OTHER, admissible=False,
                         eta=0.0, tau=1.0)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.clip(2.0 - 2.0 * x, 0.0, None)


class TransformedCalibrator(Calibrator):
    """
    Plateau transform of a calibrator for K inputs and eta in [0, 1/K]

    g(x) = f((x - eta)/(1 - K eta)) for x in (eta, 1 - (K-1) eta] and
    g = K on [0, eta]. Base values are capped at K so g stays decreasing;
    the integral is K eta + (1 - K eta) int f.
    """

    def __init__(self, base: Calibrator, eta: float, K: int):
        if K < 2:
            raise RangeError(f"Transform needs K >= 2, got {K}")
        if not 0.0 <= eta <= 1.0 / K:
            raise RangeError(f"eta={eta} outside [0, 1/K]")
        self.base = base
        self.scale = 1.0 - K * eta
        super().__init__(f"transform({base.name},eta={eta!r})", K, float(K),
                         base.convexity_class, admissible=False,
                         eta=eta, tau=1.0 - (K - 1) * eta)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        out = np.where(x <= self.eta, float(self.K), 0.0)
        active = (x > self.eta) & (x <= self.tau)
        if self.scale > 0 and np.any(active):
            mapped = self.base((x[active] - self.eta) / self.scale)
            out[active] = np.minimum(mapped, float(self.K))
        return out

    def breakpoints(self) -> List[float]:
        points = [self.eta, self.tau]
        points += [self.eta + self.scale * b for b in self.base.breakpoints()]
        return points


def grid_harmonic_calibrator(K: int) -> GridHarmonicCalibrator:
    """The grid harmonic calibrator for K inputs"""
    return GridHarmonicCalibrator(K)


def mstar_calibrator(r: float, K: int, coeffs: Optional[MCoefficients] = None) -> MStarCalibrator:
    """
    Calibrator of F*_{r,K}

    Raises:
        RangeError: If r >= K-1 or K < 3
    """
    return MStarCalibrator(r, K, coeffs)


def o_family_calibrator(k: int, K: int, admissible: bool = False) -> OFamilyCalibrator:
    """(K/k) 1_{(0,k/K]} with f(0) = inf (admissible) or f(0) = K"""
    return OFamilyCalibrator(k, K, admissible)


def arithmetic_calibrator_k2() -> ArithmeticCalibrator:
    return ArithmeticCalibrator()


def transformed_calibrator(base: Calibrator, eta: float, K: int) -> TransformedCalibrator:
    return TransformedCalibrator(base, eta, K)


_SPEC_PATTERNS = {
    "mstar": re.compile(r"^mstar:r=(?P<value>[^:]+)$"),
    "o": re.compile(r"^o:k=(?P<value>[^:]+)$"),
    "o-plain": re.compile(r"^o:k=(?P<value>[^:]+):f0=K$"),
}


def parse_calibrator_spec(spec: str) -> Tuple[str, Optional[float]]:
    """
    Split a calibrator spec string into its kind and parameter

    Supported: "grid-harmonic", "mstar:r=<real>", "o:k=<int>" and
    "o:k=<int>:f0=K". The plain O-family spec gives the admissible
    calibrator with f(0) = inf; the ":f0=K" suffix keeps f(0) = K.

    Raises:
        MethodError: If the spec string is not recognized or its parameter does not parse
    """
    text = spec.strip()
    if text == "grid-harmonic":
        return "grid-harmonic", None

    for kind, pattern in _SPEC_PATTERNS.items():
        match = pattern.match(text)
        if not match:
            continue
        raw = match.group("value")
        try:
            value = float(raw) if kind == "mstar" else int(raw)
        except ValueError:
            raise MethodError(f"Cannot parse parameter {raw!r} in calibrator spec {spec!r}")
        if value != value:
            raise MethodError(f"NaN parameter in calibrator spec {spec!r}")
        return kind, value

    raise MethodError(f"Unknown calibrator spec {spec!r}")


def calibrator_from_spec(spec: str, K: int) -> Calibrator:
    """Build the calibrator described by a spec string for K inputs"""
    kind, value = parse_calibrator_spec(spec)
    if kind == "grid-harmonic":
        return grid_harmonic_calibrator(K)
    if kind == "mstar":
        return mstar_calibrator(value, K)
    return o_family_calibrator(value, K, admissible=(kind == "o"))
