"""
Simulation experiments: empirical CDFs of merged p-values, borderline epsilon
for the discrete scenario and the validity sweep
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from dataclasses_json import dataclass_json

from pmerge_sdk.merging import MergeMethod, parse_method
from pmerge_sdk.models.base_models import NoRejectionError, PVector, RangeError
from config.settings import get_simulation_config
from .models import DiscreteScenario
from .sampler import discretize

logger = logging.getLogger(__name__)

MethodLike = Union[str, MergeMethod]

PROGRESS_EVERY = 10_000
EPSILON_FLOOR = 1e-100


def _as_method(method: MethodLike) -> MergeMethod:
    return method if isinstance(method, MergeMethod) else parse_method(method)


def default_grid(discrete: bool = False, size: Optional[int] = None) -> np.ndarray:
    """Equispaced thresholds on [0, 1], or on [0, 0.05] for the discrete variant"""
    size = size or get_simulation_config()["cdf_grid_size"]
    upper = 0.05 if discrete else 1.0
    return np.linspace(0.0, upper, size)


def merged_samples(sampler, methods: Sequence[MethodLike], reps: int,
                   discretize_D: Optional[int] = None, threads: Optional[int] = None) -> np.ndarray:
    """
    Merged p-values of every method on the same replications

    Args:
        sampler: Model with a draw(replication) -> PVector method
        methods: Merging methods
        reps: Number of replications
        discretize_D: Discretize inputs to ceil(D p)/D before merging
        threads: Worker threads (PMERGE_THREADS if not provided)

    Returns:
        Array of shape (reps, len(methods)); row i comes from replication i
    """
    if reps < 1:
        raise RangeError(f"Need at least one replication, got {reps}")
    methods = [_as_method(m) for m in methods]
    threads = threads or get_simulation_config()["threads"]

    def replicate(i: int) -> List[float]:
        p = sampler.draw(i)
        if discretize_D is not None:
            p = discretize(p, discretize_D)
        if i and i % PROGRESS_EVERY == 0:
            logger.info(f"Replication {i}/{reps}")
        return [m(p) for m in methods]

    logger.info(f"Simulating {reps} replications for {', '.join(m.name for m in methods)}")
    try:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                rows = list(executor.map(replicate, range(reps), chunksize=64))
        else:
            rows = [replicate(i) for i in range(reps)]
    except Exception as e:
        logger.error(f"Simulation failed: {e}")
        raise
    return np.array(rows, dtype=float).reshape(reps, len(methods))


def _fractions(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.sort(values), grid, side="right") / values.size


def empirical_cdf(model, method: MethodLike, reps: int, grid: Optional[Sequence[float]] = None,
                  discretize_D: Optional[int] = None, threads: Optional[int] = None) -> np.ndarray:
    """
    Fraction of replications with F(P) <= t for every threshold t

    Returns:
        Array of shape (len(grid), 2) with columns threshold, fraction
    """
    grid = np.asarray(grid if grid is not None else default_grid(discretize_D is not None), dtype=float)
    values = merged_samples(model, [method], reps, discretize_D, threads)[:, 0]
    return np.column_stack([grid, _fractions(values, grid)])


def empirical_cdfs(model, methods: Sequence[MethodLike], reps: int,
                   grid: Optional[Sequence[float]] = None, discretize_D: Optional[int] = None,
                   threads: Optional[int] = None) -> dict:
    """Empirical CDFs of several methods on common replications, keyed by method name"""
    methods = [_as_method(m) for m in methods]
    grid = np.asarray(grid if grid is not None else default_grid(discretize_D is not None), dtype=float)
    values = merged_samples(model, methods, reps, discretize_D, threads)
    return {m.name: np.column_stack([grid, _fractions(values[:, k], grid)])
            for k, m in enumerate(methods)}


def borderline_epsilon(scenario: DiscreteScenario, method: MethodLike,
                       iterations: Optional[int] = None) -> float:
    """
    Largest eps in (0, 1/K1] with F(eps, 2 eps, ..., K1 eps, 1, ..., 1) <= alpha_target

    Bisection on log eps; the merged value is nondecreasing in eps.

    Raises:
        NoRejectionError: If no eps reaches the target
    """
    method = _as_method(method)
    iterations = iterations or get_simulation_config()["borderline_iterations"]
    alpha = scenario.alpha_target

    def rejects(eps: float) -> bool:
        return method.rejects(scenario.pvalues(eps), alpha)

    upper = 1.0 / scenario.K1
    if rejects(upper):
        return upper
    lower = EPSILON_FLOOR / scenario.K1
    if not rejects(lower):
        raise NoRejectionError(
            f"{method.name} does not reach {alpha} for any eps in the scenario K={scenario.K}, K1={scenario.K1}",
            {"method": method.name, "K": scenario.K, "K1": scenario.K1, "discretize_D": scenario.discretize_D},
        )

    log_low, log_high = math.log(lower), math.log(upper)
    for _ in range(iterations):
        mid = 0.5 * (log_low + log_high)
        if rejects(math.exp(mid)):
            log_low = mid
        else:
            log_high = mid

    eps = math.exp(log_low)
    logger.debug(f"Borderline eps for {method.name}: {eps!r}")
    return eps


@dataclass_json
@dataclass
class ValidityReport:
    """Empirical exceedance Q(F <= t) against the p-variable bound t"""
    method: str
    reps: int
    thresholds: List[float] = field(default_factory=list)
    exceedance: List[float] = field(default_factory=list)
    stderr: List[float] = field(default_factory=list)
    z_scores: List[float] = field(default_factory=list)
    sigmas: float = 4.0

    @property
    def max_z(self) -> float:
        return max(self.z_scores) if self.z_scores else float("-inf")

    @property
    def passes(self) -> bool:
        return self.max_z <= self.sigmas


def validity_sweep(method: Union[MethodLike, Callable[[PVector], float]], sampler, reps: int,
                   grid: Optional[Sequence[float]] = None, sigmas: float = 4.0,
                   threads: Optional[int] = None) -> ValidityReport:
    """
    Check Q(F <= t) <= t up to Monte Carlo error over a threshold grid

    The standard error at t is that of a frequency with success probability t.
    method may also be any callable returning a merged p-value.
    """
    grid = np.asarray(grid if grid is not None else np.linspace(0.05, 1.0, 20), dtype=float)
    if isinstance(method, (str, MergeMethod)):
        method = _as_method(method)
        name = method.name
    else:
        name = getattr(method, "name", getattr(method, "__name__", "merge"))

    threads = threads or get_simulation_config()["threads"]

    def replicate(i: int) -> float:
        return float(method(sampler.draw(i)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            values = np.array(list(executor.map(replicate, range(reps), chunksize=64)))
    else:
        values = np.array([replicate(i) for i in range(reps)])

    exceedance = _fractions(values, grid)
    stderr = np.sqrt(grid * (1.0 - grid) / reps)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, (exceedance - grid) / stderr,
                     np.where(exceedance > grid, np.inf, 0.0))

    report = ValidityReport(name, reps, grid.tolist(), exceedance.tolist(), stderr.tolist(),
                            z.tolist(), sigmas)
    if not report.passes:
        logger.warning(f"{name} exceeds the p-variable bound: max z = {report.max_z:.2f}")
    return report
