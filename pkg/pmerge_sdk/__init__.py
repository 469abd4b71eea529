"""
pmerge SDK - p-value merging functions valid under arbitrary dependence
"""

from typing import Optional, Union

from .models.base_models import PMergeError, PVector, MergeResult, MCoefficients
from .cache.coefficient_cache import CoefficientCache
from .merging import MergeMethod, parse_method, solve_m_coefficients
from .calibrators import Calibrator, calibrator_from_spec, check_admissibility_condition, AdmissibilityReport
from .core.pvector import validate_pvector, read_pvector_csv, PVectorLike

__version__ = "0.1.0"
__all__ = ["PMergeSDK", "CoefficientCache", "PMergeError", "MergeMethod", "parse_method", "PVector"]


class PMergeSDK:
    """
    Main SDK class bundling method parsing, merging and the coefficient cache

    Usage:
        sdk = PMergeSDK()

        result = sdk.merge([0.01, 0.04, 0.9], "hommel")
        coeffs = sdk.coefficients(-1, 3)
        report = sdk.admissibility("mstar:r=-1", 3)
    """

    def __init__(self, cache_file: Optional[str] = None, persist: Optional[bool] = None):
        """
        Initialize pmerge SDK

        Args:
            cache_file: Coefficient cache file (uses config default if not provided)
            persist: Persist solved coefficients between runs
        """
        self._cache = CoefficientCache(cache_file=cache_file, persist=persist)

    @property
    def cache(self) -> CoefficientCache:
        """Access to the coefficient cache"""
        return self._cache

    def method(self, method: Union[str, MergeMethod]) -> MergeMethod:
        """Parse a method string (MergeMethod instances pass through)"""
        return method if isinstance(method, MergeMethod) else parse_method(method)

    def merge(self, p: PVectorLike, method: Union[str, MergeMethod]) -> MergeResult:
        """Merge p-values with the given method"""
        return self.method(method).merge(validate_pvector(p))

    def merge_csv(self, path: str, method: Union[str, MergeMethod]) -> MergeResult:
        """Merge the p-values stored one per line in a CSV file"""
        return self.merge(read_pvector_csv(path), method)

    def coefficients(self, r: float, K: int) -> MCoefficients:
        """Solve (or look up) c_r, d_r and b_{r,K}"""
        return solve_m_coefficients(r, K, cache=self._cache)

    def calibrator(self, spec: str, K: int) -> Calibrator:
        """Build a calibrator from its spec string"""
        return calibrator_from_spec(spec, K)

    def admissibility(self, spec: str, K: int) -> AdmissibilityReport:
        """Check the sufficient admissibility condition for a calibrator spec"""
        return check_admissibility_condition(self.calibrator(spec, K), K)
