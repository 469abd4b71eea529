"""Domination checks, dominating fixtures for prime K and two-input theory"""

from .domination import (
    DominationVerdict,
    Relation,
    witness_grid,
    m_scaled_domination,
    m_family_domination,
)
from .prime import PrimeCounterexample, prime_counterexample
from .two_dim import DiagonalCurve, LowerSetBoundary, diag_curve_merge, ucp_lower_set_k2

__all__ = [
    "DominationVerdict",
    "Relation",
    "witness_grid",
    "m_scaled_domination",
    "m_family_domination",
    "PrimeCounterexample",
    "prime_counterexample",
    "DiagonalCurve",
    "LowerSetBoundary",
    "diag_curve_merge",
    "ucp_lower_set_k2",
]
