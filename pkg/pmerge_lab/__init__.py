"""
pmerge lab - discovery matrices, simulations, domination analysis and the command line
"""

from .discovery import DiscoveryMatrix, discovery_matrix
from .simulation import ZTestModel, DiscreteScenario, borderline_epsilon, empirical_cdf
from .analysis import DominationVerdict, m_family_domination, prime_counterexample
from .export import ResultExporter

__version__ = "0.1.0"
__all__ = [
    "DiscoveryMatrix",
    "discovery_matrix",
    "ZTestModel",
    "DiscreteScenario",
    "borderline_epsilon",
    "empirical_cdf",
    "DominationVerdict",
    "m_family_domination",
    "prime_counterexample",
    "ResultExporter",
]
