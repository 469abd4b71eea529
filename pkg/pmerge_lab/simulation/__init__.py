"""Simulation lab: samplers, empirical CDFs, borderline epsilon and validity sweeps"""

from .models import ZTestModel, AdversarialPermutationModel, DiscreteScenario
from .sampler import draw_pvalues, draw_adversarial, adversarial_permutation_model, discretize
from .experiments import (
    ValidityReport,
    default_grid,
    merged_samples,
    empirical_cdf,
    empirical_cdfs,
    borderline_epsilon,
    validity_sweep,
)

__all__ = [
    "ZTestModel",
    "AdversarialPermutationModel",
    "DiscreteScenario",
    "draw_pvalues",
    "draw_adversarial",
    "adversarial_permutation_model",
    "discretize",
    "ValidityReport",
    "default_grid",
    "merged_samples",
    "empirical_cdf",
    "empirical_cdfs",
    "borderline_epsilon",
    "validity_sweep",
]
