"""
Simulation models: correlated z-test p-values, the adversarial permutation model
and the discrete borderline scenario
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pmerge_sdk.models.base_models import RangeError
from config.settings import get_simulation_config


def _default_seed() -> int:
    return get_simulation_config()["seed"]


def _default_mu_alt() -> float:
    return get_simulation_config()["mu_alt"]


@dataclass(frozen=True)
class ZTestModel:
    """
    One-sided z-tests on equicorrelated Gaussian observations

    The first K1 observations are alternatives with mean mu_alt, the rest
    nulls. Pairwise correlations are rho; with flip_last the last
    observation has correlation -rho with every other one.
    """
    K: int
    K1: int = 0
    mu_alt: float = field(default_factory=_default_mu_alt)
    rho: float = 0.0
    flip_last: bool = False
    seed: int = field(default_factory=_default_seed)

    def __post_init__(self):
        """Validate model parameters"""
        if self.K < 2:
            raise RangeError(f"Z-test model needs K >= 2, got {self.K}")
        if not 0 <= self.K1 <= self.K:
            raise RangeError(f"Number of alternatives K1={self.K1} outside 0..{self.K}")
        if not 0.0 <= self.rho < 1.0:
            raise RangeError(f"Correlation rho={self.rho} outside [0, 1)")
        if not np.isfinite(self.mu_alt):
            raise RangeError(f"Alternative mean must be finite, got {self.mu_alt}")

    @property
    def K0(self) -> int:
        """Number of true nulls"""
        return self.K - self.K1

    @property
    def means(self) -> np.ndarray:
        mu = np.zeros(self.K)
        mu[:self.K1] = self.mu_alt
        return mu

    def draw(self, replication: int = 0):
        from .sampler import draw_pvalues
        return draw_pvalues(self, replication)


@dataclass(frozen=True)
class AdversarialPermutationModel:
    """
    With probability K alpha a uniformly random permutation of
    (alpha, 2 alpha, ..., K alpha), otherwise (1, ..., 1)

    Every margin is a p-variable, and Simes attains Q(S_K <= K alpha) = K alpha.
    """
    K: int
    alpha: float
    seed: int = field(default_factory=_default_seed)

    def __post_init__(self):
        """Validate model parameters"""
        if self.K < 2:
            raise RangeError(f"Permutation model needs K >= 2, got {self.K}")
        if not 0.0 < self.alpha or self.K * self.alpha > 1.0:
            raise RangeError(f"Need 0 < alpha and K*alpha <= 1, got K={self.K}, alpha={self.alpha}")

    def draw(self, replication: int = 0):
        from .sampler import draw_adversarial
        return draw_adversarial(self, replication)


@dataclass(frozen=True)
class DiscreteScenario:
    """
    The deterministic vector (eps, 2 eps, ..., K1 eps, 1, ..., 1) of length K,
    optionally discretized to the grid {1/D, 2/D, ...} before merging
    """
    K: int
    K1: int
    alpha_target: float = 0.01
    discretize_D: Optional[int] = None

    def __post_init__(self):
        """Validate scenario parameters"""
        if self.K < 2:
            raise RangeError(f"Scenario needs K >= 2, got {self.K}")
        if not 1 <= self.K1 <= self.K:
            raise RangeError(f"Number of small p-values K1={self.K1} outside 1..{self.K}")
        if not 0.0 < self.alpha_target < 1.0:
            raise RangeError(f"Target level {self.alpha_target} outside (0, 1)")
        if self.discretize_D is not None and self.discretize_D < 1:
            raise RangeError(f"Discretization D must be >= 1, got {self.discretize_D}")

    def pvalues(self, eps: float) -> np.ndarray:
        """Scenario vector at eps"""
        p = np.ones(self.K)
        p[:self.K1] = eps * np.arange(1, self.K1 + 1, dtype=float)
        if self.discretize_D is not None:
            from .sampler import discretize
            p = discretize(p, self.discretize_D).values
        return p
