"""P-to-e calibrators, e-merging and the admissibility condition"""

from .base import Calibrator, StepCalibrator, ConvexityClass
from .families import (
    GridHarmonicCalibrator,
    OFamilyCalibrator,
    MStarCalibrator,
    ArithmeticCalibrator,
    TransformedCalibrator,
    grid_harmonic_calibrator,
    mstar_calibrator,
    o_family_calibrator,
    arithmetic_calibrator_k2,
    transformed_calibrator,
    calibrator_from_spec,
    parse_calibrator_spec,
)
from .admissibility import AdmissibilityReport, check_admissibility_condition
from .e_merging import p_to_e_merge, naive_detour_merge

__all__ = [
    "Calibrator",
    "StepCalibrator",
    "ConvexityClass",
    "GridHarmonicCalibrator",
    "OFamilyCalibrator",
    "MStarCalibrator",
    "ArithmeticCalibrator",
    "TransformedCalibrator",
    "grid_harmonic_calibrator",
    "mstar_calibrator",
    "o_family_calibrator",
    "arithmetic_calibrator_k2",
    "transformed_calibrator",
    "calibrator_from_spec",
    "parse_calibrator_spec",
    "AdmissibilityReport",
    "check_admissibility_condition",
    "p_to_e_merge",
    "naive_detour_merge",
]
