"""Merging functions: classic families, coefficient solver, induced mergers and method handles"""

from .coefficients import solve_m_coefficients, precise_threshold, root_log_ratio
from .classic import (
    harmonic_number,
    harmonic_numbers,
    bonferroni,
    o_family,
    simes,
    hommel,
    power_mean,
    m_family,
)
from .induced import (
    InducedMerge,
    merge_induced,
    merge_weighted_induced,
    grid_harmonic_exact,
    grid_harmonic,
    m_star,
    m_star_equivalence_check,
)
from .ratio import (
    ImprovementWitness,
    gamma_K,
    gamma_bounds,
    hommel_improvement_witness,
    improvement_ratio_mstar,
    mstar_ratio_witness,
)
from .methods import MergeMethod, MethodTag, parse_method

__all__ = [
    "solve_m_coefficients",
    "precise_threshold",
    "root_log_ratio",
    "harmonic_number",
    "harmonic_numbers",
    "bonferroni",
    "o_family",
    "simes",
    "hommel",
    "power_mean",
    "m_family",
    "InducedMerge",
    "merge_induced",
    "merge_weighted_induced",
    "grid_harmonic_exact",
    "grid_harmonic",
    "m_star",
    "m_star_equivalence_check",
    "ImprovementWitness",
    "gamma_K",
    "gamma_bounds",
    "hommel_improvement_witness",
    "improvement_ratio_mstar",
    "mstar_ratio_witness",
    "MergeMethod",
    "MethodTag",
    "parse_method",
]
