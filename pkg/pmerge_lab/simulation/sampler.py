"""
P-value samplers

Replication i of a model draws from its own generator seeded by (seed, i),
so results do not depend on the order or the thread that runs them.
"""

import logging

import numpy as np
from scipy.special import ndtr

from pmerge_sdk.core.pvector import validate_pvector, PVectorLike
from pmerge_sdk.models.base_models import PVector, RangeError
from .models import AdversarialPermutationModel, ZTestModel

logger = logging.getLogger(__name__)


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Independent generator for one replication"""
    return np.random.default_rng([int(seed), int(replication)])


def draw_pvalues(model: ZTestModel, replication: int = 0) -> PVector:
    """
    One draw of the z-test p-values p_i = Phi(X_i)

    Single-factor construction: X_i = mu_i + sqrt(rho) Z + sqrt(1-rho) e_i,
    with the sign of the common factor reversed for the last observation
    when flip_last is set.
    """
    rng = replication_rng(model.seed, replication)
    common = rng.standard_normal()
    noise = rng.standard_normal(model.K)

    loadings = np.full(model.K, np.sqrt(model.rho))
    if model.flip_last:
        loadings[-1] = -loadings[-1]
    x = model.means + loadings * common + np.sqrt(1.0 - model.rho) * noise
    return PVector(ndtr(x))


def draw_adversarial(model: AdversarialPermutationModel, replication: int = 0) -> PVector:
    """One draw of the adversarial permutation model"""
    rng = replication_rng(model.seed, replication)
    if rng.random() < model.K * model.alpha:
        return PVector(rng.permutation(model.alpha * np.arange(1, model.K + 1, dtype=float)))
    return PVector(np.ones(model.K))


def adversarial_permutation_model(K: int, alpha: float, seed: int = None) -> AdversarialPermutationModel:
    """
    Sampler for the adversarial permutation model

    Raises:
        RangeError: If K alpha > 1
    """
    if seed is None:
        return AdversarialPermutationModel(K, alpha)
    return AdversarialPermutationModel(K, alpha, seed)


def discretize(p: PVectorLike, D: int) -> PVector:
    """
    Componentwise ceil(D p) / D

    Raises:
        RangeError: If D < 1
    """
    if D < 1:
        raise RangeError(f"Discretization D must be >= 1, got {D}")
    p = validate_pvector(p)
    return PVector(np.ceil(p.values * D) / D)
