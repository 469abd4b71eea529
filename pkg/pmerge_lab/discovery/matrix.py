"""
Discovery matrices DM_{l,j} by the suffix-augmented set search

For the l smallest p-values R and j <= l, DM'_{l,j} is the largest merged
p-value over the sets {j, ..., l} u {i, ..., K}, i = l+1, ..., K+1 (the last
one being the empty suffix), and DM_{l,j} is the running maximum of DM' over
j. Indices refer to the ascending order statistics.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from pmerge_sdk.calibrators.base import EDGE_SNAP
from pmerge_sdk.core.pvector import validate_pvector, PVectorLike
from pmerge_sdk.merging import MergeMethod, MethodTag, parse_method, harmonic_numbers, grid_harmonic
from pmerge_sdk.merging.coefficients import equation_branch, solve_m_coefficients
from pmerge_sdk.merging.induced import REJECTION_SLACK
from pmerge_sdk.models.base_models import ArityError, MethodError, RangeError
from config.settings import get_simulation_config
from .models import DiscoveryMatrix

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 12
GENERIC_SET_WARNING = 1_000_000

RowFunction = Callable[[int], np.ndarray]


def _as_method(family: Union[str, MergeMethod]) -> MergeMethod:
    return family if isinstance(family, MergeMethod) else parse_method(family)


def check_family(family: MergeMethod):
    """
    Check that a family has a definition at every arity the search needs

    Raises:
        MethodError: For non-symmetric methods
        ArityError: For O-family indices k > 1, or F*_r with r >= 1 (undefined at arity 2)
    """
    if not family.is_symmetric:
        raise MethodError(f"Discovery matrices need a symmetric family, got {family.name}")
    if family.tag in (MethodTag.O_FAMILY, MethodTag.O_STAR) and family.k > 1:
        raise ArityError(f"{family.name} is undefined for fewer than {family.k} p-values")
    if family.tag == MethodTag.M_STAR and family.r >= 1:
        raise ArityError(f"{family.name} is undefined for two p-values (needs r < 1)")


def evaluate_subset(family: MergeMethod, values: Sequence[float]) -> float:
    """
    Merged p-value of an arbitrary set of p-values under the family at its own arity

    Arity 1 is the identity; F*_r for two p-values is Bonferroni.

    Raises:
        RangeError: For an empty set
        ArityError: If the family is undefined at this arity
    """
    x = np.sort(np.minimum(np.asarray(values, dtype=float), 1.0), kind="stable")
    if x.size == 0:
        raise RangeError("Cannot merge an empty set of p-values")
    if x[0] == 0.0:
        return 0.0
    m = x.size
    if m == 1:
        return float(x[0])
    if family.tag in (MethodTag.O_FAMILY, MethodTag.O_STAR) and family.k > m:
        raise ArityError(f"{family.name} is undefined for {m} p-values")
    if family.tag == MethodTag.M_STAR:
        if family.r >= m - 1:
            raise ArityError(f"{family.name} is undefined for {m} p-values")
        if m == 2:
            return min(2.0 * float(x[0]), 1.0)
    return family.merge(x).p


def _simes_suffix_table(s: np.ndarray, depth: int) -> np.ndarray:
    """
    T[a, i] = min_{u >= 1} s[i+u-1] / (a+u) for a = 0..depth, i = 0..K (T[:, K] = inf)

    Built right to left from T[a, i] = min(s[i]/(a+1), T[a+1, i+1]).
    """
    K = s.size
    span = depth + K + 1
    offsets = np.arange(span, dtype=float)
    column = np.full(span + 1, np.inf)
    table = np.full((depth + 1, K + 1), np.inf)
    for i in range(K - 1, -1, -1):
        column[:span] = np.minimum(s[i] / (offsets + 1.0), column[1:span + 1])
        table[:, i] = column[:depth + 1]
    return table


class _RowBase:
    """Shared state of the per-row evaluators on the sorted input"""

    def __init__(self, s: np.ndarray, corner: int):
        self.s = s
        self.K = s.size
        self.corner = corner

    def grid(self, l: int) -> Tuple[np.ndarray, np.ndarray]:
        """Block starts j0 = j-1 (j = 1..l) and suffix starts i0 = l..K (0-based)"""
        return np.arange(l), np.arange(l, self.K + 1)

    def zero_rows(self, l: int) -> np.ndarray:
        return self.s[:l] == 0.0


class _BonferroniRows(_RowBase):
    """The full suffix maximizes m * p_(j): DM'_{l,j} = (K-j+1) p_(j) ^ 1"""

    def __call__(self, l: int) -> np.ndarray:
        j = np.arange(1, l + 1)
        return np.minimum((self.K - j + 1) * self.s[:l], 1.0)


class _SimesRows(_RowBase):
    """Simes (or Hommel) values of every candidate set of a row from the suffix table"""

    def __init__(self, s: np.ndarray, corner: int, hommel: bool = False):
        super().__init__(s, corner)
        self.hommel = hommel
        self.table = _simes_suffix_table(s, corner)
        self.ell = harmonic_numbers(self.K)

    def block_minima(self, l: int) -> np.ndarray:
        """min_{t} s[j0+t-1]/t over the block {j0, ..., l-1}, for every j0"""
        j0, _ = self.grid(l)
        ranks = np.arange(l)[None, :] - j0[:, None] + 1.0
        with np.errstate(divide="ignore"):
            ratios = np.where(ranks >= 1, self.s[None, :l] / ranks, np.inf)
        return ratios.min(axis=1)

    def statistics(self, l: int) -> Tuple[np.ndarray, np.ndarray]:
        """Unclipped Simes values and arities, shape (l, K-l+1)"""
        j0, i0 = self.grid(l)
        block = l - j0
        arity = block[:, None] + (self.K - i0)[None, :]
        suffix = self.table[block[:, None], i0[None, :]]
        simes = arity * np.minimum(self.block_minima(l)[:, None], suffix)
        return simes, arity

    def __call__(self, l: int) -> np.ndarray:
        simes, arity = self.statistics(l)
        if self.hommel:
            simes = simes * self.ell[arity - 1]
        return np.minimum(simes, 1.0).max(axis=1)


class _PowerMeanRows(_RowBase):
    """
    M-family and F*_r (r <= 0) values from cumulative power sums

    Q[i] = sum_{u >= i} s_u^r and P[i] = sum_{u < i} s_u^r (logarithms for
    r = 0). A range [a, b) is differenced from the side holding the smaller
    terms: Q[a] - Q[b] when the terms decrease along s (r <= 0), P[b] - P[a]
    when they increase (r > 0). Suffix sums are read from Q directly.
    """

    def __init__(self, s: np.ndarray, corner: int, r: float, star: bool):
        super().__init__(s, corner)
        self.r = r
        self.star = star
        self.geometric = equation_branch(r) == "geometric"

        coeffs = [solve_m_coefficients(r, m) for m in range(1, self.K + 1)]
        self.b = np.array([c.b_rK for c in coeffs])
        self.log_c = np.log(np.array([c.c_r for c in coeffs]))
        self.log_d = np.log(np.array([c.d_r for c in coeffs]))

        base = np.where(s > 0, s, 1.0).astype(np.longdouble)
        terms = np.log(base) if self.geometric else base ** r
        self.Q = np.zeros(self.K + 1, dtype=np.longdouble)
        self.Q[:self.K] = np.cumsum(terms[::-1])[::-1]
        self.P = np.zeros(self.K + 1, dtype=np.longdouble)
        self.P[1:] = np.cumsum(terms)
        self.ascending = not self.geometric and r > 0

    def range_sum(self, a, b):
        """Power sum over the sorted positions [a, b)"""
        if self.ascending:
            return self.P[b] - self.P[a]
        return self.Q[a] - self.Q[b]

    def _mean_values(self, l: int) -> np.ndarray:
        j0, i0 = self.grid(l)
        arity = (l - j0)[:, None] + (self.K - i0)[None, :]
        total = self.range_sum(j0, l)[:, None] + self.Q[i0][None, :]
        if self.geometric:
            means = np.exp(total / arity)
        else:
            means = (total / arity) ** (1.0 / self.r)
        return np.minimum(self.b[arity - 1] * means.astype(float), 1.0)

    def _log_ratio(self, n, j0, i0, block, arity, l):
        """log M_{r,n}(first n of the set) - log M_{r,n}(c, d, ..., d) at the set's arity"""
        in_block = np.minimum(n, block)
        past_block = np.maximum(n - block, 0)
        sums = self.range_sum(j0, j0 + in_block) + self.range_sum(i0, i0 + past_block)
        sums = sums.astype(float)
        log_c, log_d = self.log_c[arity - 1], self.log_d[arity - 1]
        if self.geometric:
            return (sums - log_c - (n - 1) * log_d) / n
        with np.errstate(divide="ignore"):
            log_copies = np.log(n - 1.0)
        log_ref = np.logaddexp(self.r * log_c, log_copies + self.r * log_d)
        return (np.log(sums) - log_ref) / self.r

    def _star_values(self, l: int) -> np.ndarray:
        j0, i0 = self.grid(l)
        J, I = np.meshgrid(j0, i0, indexing="ij")
        J, I = J.ravel(), I.ravel()
        block = l - J
        arity = block + (self.K - I)

        # the prefix ratios first decrease then increase in n, so bisect for the turning point
        low = np.ones_like(arity)
        high = arity.copy()
        active = low < high
        while np.any(active):
            mid = (low + high) // 2
            rising = (self._log_ratio(np.minimum(mid + 1, arity), J, I, block, arity, l)
                      >= self._log_ratio(mid, J, I, block, arity, l))
            high = np.where(active & rising, mid, high)
            low = np.where(active & ~rising, mid + 1, low)
            active = low < high

        best = np.minimum(self._log_ratio(low, J, I, block, arity, l),
                          self._log_ratio(arity, J, I, block, arity, l))
        return np.minimum(np.exp(best), 1.0).reshape(l, -1)

    def __call__(self, l: int) -> np.ndarray:
        values = self._star_values(l) if self.star else self._mean_values(l)
        row = values.max(axis=1)
        row[self.zero_rows(l)] = 0.0
        return row


class _MaximumRows(_RowBase):
    """r = +inf: every set containing the full suffix merges to p_(K)"""

    def __call__(self, l: int) -> np.ndarray:
        row = np.full(l, self.s[-1])
        row[self.zero_rows(l)] = 0.0
        return row


class _GenericRows(_RowBase):
    """Per-set evaluation for families without a vectorized path"""

    def __init__(self, s: np.ndarray, corner: int, family: MergeMethod):
        super().__init__(s, corner)
        self.family = family

    def __call__(self, l: int) -> np.ndarray:
        row = np.empty(l)
        for j0 in range(l):
            block = self.s[j0:l]
            row[j0] = max(evaluate_subset(self.family, np.concatenate([block, self.s[i0:]]))
                          for i0 in range(l, self.K + 1))
        return row


class _GridHarmonicRows(_RowBase):
    """
    Running maximum DM_{l,.} for the grid harmonic family

    Keeps the current maximum cm = DM_{l,j-1} and evaluates H* only on sets
    that can exceed it: Hommel bounds H* from above and Simes from below,
    and for the sets in between one pass of the rejection test at level cm
    decides. Each exact evaluation raises cm and the filter is reapplied.
    """

    def __init__(self, s: np.ndarray, corner: int):
        super().__init__(s, corner)
        self.simes = _SimesRows(s, corner)
        self.ell = self.simes.ell

    def _members(self, l: int, j0: int, i0: int) -> np.ndarray:
        return np.concatenate([self.s[j0:l], self.s[i0:]])

    def _exact(self, l: int, j0: int, i0: int) -> float:
        values = self._members(l, j0, i0)
        if values.size == 1:
            return float(min(values[0], 1.0))
        return grid_harmonic(values)

    def _rejects(self, l: int, j0: int, i0: np.ndarray, arity: np.ndarray, level: float) -> np.ndarray:
        """(1/m) sum_k f_m(p_k/level) >= 1 for each set {j0..l-1} u {i0..K-1}"""
        s, K = self.s, self.K
        reach = level / self.ell[arity - 1] * (1.0 + 2.0 * EDGE_SNAP)
        cut = np.searchsorted(s, reach, side="right")
        block_len = np.maximum(np.minimum(cut, l) - j0, 0)
        suffix_len = np.maximum(np.minimum(cut, K) - i0, 0)

        groups = np.arange(i0.size)
        group_ids = np.concatenate([np.repeat(groups, block_len), np.repeat(groups, suffix_len)])
        starts = np.concatenate([np.full(block_len.sum(), j0),
                                 np.repeat(i0, suffix_len)])
        offsets = np.concatenate([_ragged_offsets(block_len), _ragged_offsets(suffix_len)])
        members = s[starts + offsets]

        m = arity[group_ids]
        steps = np.ceil(m * self.ell[m - 1] * (members / level) * (1.0 - EDGE_SNAP))
        steps = np.maximum(steps, 1.0)
        shares = np.where(steps <= m, 1.0 / steps, 0.0)
        sums = np.bincount(group_ids, weights=shares, minlength=i0.size)
        return sums >= 1.0 - REJECTION_SLACK

    def __call__(self, l: int) -> np.ndarray:
        simes_raw, arity = self.simes.statistics(l)
        lower = np.minimum(simes_raw, 1.0)
        upper = np.minimum(simes_raw * self.ell[arity - 1], 1.0)
        _, i0_all = self.grid(l)

        row = np.empty(l)
        cm = 0.0
        for j0 in range(l):
            if cm >= 1.0:
                row[j0:] = 1.0
                break
            if self.s[j0] == 0.0:
                row[j0] = cm
                continue

            pending = np.flatnonzero(upper[j0] > cm)
            seeds = [k for k in (0, i0_all.size - 1) if upper[j0, k] > cm]
            for k in seeds:
                cm = max(cm, self._exact(l, j0, int(i0_all[k])))
            pending = pending[~np.isin(pending, seeds)]

            while pending.size:
                pending = pending[upper[j0, pending] > cm]
                if not pending.size:
                    break
                undecided = lower[j0, pending] <= cm
                if np.any(undecided):
                    idx = pending[undecided]
                    covered = self._rejects(l, j0, i0_all[idx], arity[j0, idx], cm)
                    pending = np.concatenate([pending[~undecided], idx[~covered]])
                    if not pending.size:
                        break
                pick = pending[np.argmax(lower[j0, pending])]
                cm = max(cm, self._exact(l, j0, int(i0_all[pick])))
                pending = pending[pending != pick]
            row[j0] = cm
        return row


def _ragged_offsets(lengths: np.ndarray) -> np.ndarray:
    """Concatenation of arange(n) for n in lengths"""
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    ends = np.cumsum(lengths)
    return np.arange(total) - np.repeat(ends - lengths, lengths)


def _row_function(family: MergeMethod, s: np.ndarray, corner: int) -> Tuple[RowFunction, bool]:
    """Row evaluator and whether it returns DM' (True) or the running maximum DM (False)"""
    tag = family.tag
    if tag == MethodTag.BONFERRONI or (tag in (MethodTag.O_FAMILY, MethodTag.O_STAR) and family.k == 1):
        return _BonferroniRows(s, corner), True
    if tag in (MethodTag.SIMES, MethodTag.HOMMEL):
        return _SimesRows(s, corner, hommel=tag == MethodTag.HOMMEL), True
    if tag == MethodTag.M_FAMILY:
        if family.r == -np.inf:
            return _BonferroniRows(s, corner), True
        if family.r == np.inf:
            return _MaximumRows(s, corner), True
        return _PowerMeanRows(s, corner, family.r, star=False), True
    if tag == MethodTag.M_STAR and family.r <= 0:
        return _PowerMeanRows(s, corner, family.r, star=True), True
    if tag == MethodTag.GRID_HARMONIC:
        return _GridHarmonicRows(s, corner), False

    sets = sum(l * (s.size - l + 1) for l in range(1, corner + 1))
    if sets > GENERIC_SET_WARNING:
        logger.warning(f"{family.name} has no vectorized path; evaluating {sets} sets one by one")
    return _GenericRows(s, corner, family), True


def _compute_rows(rows: RowFunction, corner: int, threads: int) -> List[np.ndarray]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(rows, range(1, corner + 1)))
    return [rows(l) for l in range(1, corner + 1)]


def discovery_matrix(p: PVectorLike, family: Union[str, MergeMethod], corner: Optional[int] = None,
                     alphas: Optional[Sequence[float]] = None, keep_raw: bool = False,
                     threads: Optional[int] = None) -> DiscoveryMatrix:
    """
    Discovery matrix of a p-value vector for a symmetric merging family

    Args:
        p: Input p-values (sorted internally, stable)
        family: Merging family or method string
        corner: Number of rows and columns (config default, capped at K)
        alphas: Thresholds used for categorization
        keep_raw: Also keep DM' (for grid harmonic this evaluates every set)
        threads: Rows computed in parallel (PMERGE_THREADS if not provided)

    Returns:
        DiscoveryMatrix

    Raises:
        MethodError: For non-symmetric families
        ArityError: If the family is undefined at some arity the search needs
        RangeError: If corner is outside 1..K
    """
    simulation_config = get_simulation_config()
    pv = validate_pvector(p)
    s = np.minimum(pv.sorted_view, 1.0)
    K = s.size

    corner = corner or min(simulation_config["default_corner"], K)
    if not 1 <= corner <= K:
        raise RangeError(f"Corner {corner} outside 1..{K}")
    family = _as_method(family)
    check_family(family)
    alphas = tuple(alphas or simulation_config["default_alphas"])
    threads = threads or simulation_config["threads"]

    logger.info(f"Computing {corner}x{corner} discovery matrix for {family.name}, K={K}")
    rows, returns_raw = _row_function(family, s, corner)
    if keep_raw and not returns_raw:
        rows, returns_raw = _GenericRows(s, corner, family), True
    computed = _compute_rows(rows, corner, threads)

    dm = np.full((corner, corner), np.nan)
    raw = np.full((corner, corner), np.nan) if returns_raw else None
    for l, row in enumerate(computed, start=1):
        if returns_raw:
            raw[l - 1, :l] = row
            dm[l - 1, :l] = np.maximum.accumulate(row)
        else:
            dm[l - 1, :l] = row

    result = DiscoveryMatrix(corner, dm, family.name, alphas, raw if keep_raw else None)
    if keep_raw and not result.equals_raw():
        logger.info(f"DM differs from DM' for {family.name} on some cells")
    return result


def brute_force_discovery_matrix(p: PVectorLike, family: Union[str, MergeMethod],
                                 corner: Optional[int] = None, all_subsets: bool = True) -> DiscoveryMatrix:
    """
    Discovery matrix by direct enumeration

    With all_subsets, DM_{l,j} = max F(I) over every nonempty I with
    |R \\ I| < j; otherwise only the sets {j, ..., l} u {i, ..., K} are
    evaluated, one at a time, followed by the running maximum over j.

    Raises:
        RangeError: If K exceeds the enumeration limit (all_subsets only)
    """
    pv = validate_pvector(p)
    s = np.minimum(pv.sorted_view, 1.0)
    K = s.size
    corner = corner or K
    family = _as_method(family)
    alphas = get_simulation_config()["default_alphas"]

    dm = np.full((corner, corner), np.nan)
    if not all_subsets:
        rows = _GenericRows(s, corner, family)
        for l in range(1, corner + 1):
            dm[l - 1, :l] = np.maximum.accumulate(rows(l))
        return DiscoveryMatrix(corner, dm, family.name, alphas)

    if K > BRUTE_FORCE_LIMIT:
        raise RangeError(f"Brute force is limited to K <= {BRUTE_FORCE_LIMIT}, got {K}")
    masks = np.arange(1, 1 << K)
    merged = np.array([evaluate_subset(family, s[[k for k in range(K) if mask >> k & 1]])
                       for mask in masks])
    for l in range(1, corner + 1):
        in_R = (1 << l) - 1
        missing = np.array([bin(in_R & ~int(mask)).count("1") for mask in masks])
        for j in range(1, l + 1):
            dm[l - 1, j - 1] = merged[missing < j].max()
    return DiscoveryMatrix(corner, dm, family.name, alphas)


def median_discovery_matrix(samples: Sequence[PVectorLike], family: Union[str, MergeMethod],
                            corner: Optional[int] = None, **kwargs) -> DiscoveryMatrix:
    """Element-wise median of the discovery matrices of several p-value vectors"""
    if len(samples) == 0:
        raise RangeError("Median discovery matrix needs at least one sample")
    family = _as_method(family)
    matrices = [discovery_matrix(sample, family, corner, **kwargs) for sample in samples]
    stacked = np.stack([m.dm for m in matrices])
    return DiscoveryMatrix(matrices[0].corner, np.median(stacked, axis=0), family.name,
                           matrices[0].alphas)


def categorize(dm: DiscoveryMatrix, alphas: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    Bucket index of every cell: 0 for <= alpha_1, 1 for (alpha_1, alpha_2], ...,
    len(alphas) above the last threshold; -1 above the diagonal

    Raises:
        RangeError: If alphas are not ascending
    """
    alphas = np.asarray(alphas if alphas is not None else dm.alphas, dtype=float)
    if np.any(np.diff(alphas) <= 0):
        raise RangeError(f"Thresholds must be strictly ascending, got {alphas.tolist()}")
    buckets = np.full(dm.dm.shape, -1, dtype=int)
    lower = np.tril_indices(dm.corner)
    buckets[lower] = np.searchsorted(alphas, dm.dm[lower], side="left")
    return buckets


def true_discovery_lower_bound(dm: DiscoveryMatrix, l: int, alpha: float) -> int:
    """max{j : DM_{l,j} <= alpha}, or 0 if there is none"""
    if not 1 <= l <= dm.corner:
        raise RangeError(f"Row {l} outside 1..{dm.corner}")
    return int(np.count_nonzero(dm.row(l) <= alpha))
