"""
Discovery matrix models
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np
from dataclasses_json import dataclass_json


@dataclass
class DiscoveryMatrix:
    """
    Lower-triangular matrix DM_{l,j}, 1 <= j <= l <= corner, of combined p-values

    dm[l-1, j-1] holds DM_{l,j}; cells above the diagonal are NaN. raw, when
    present, holds DM'_{l,j} before the running maximum over j.
    """
    corner: int
    dm: np.ndarray
    method_tag: str
    alphas: Tuple[float, ...] = (0.01, 0.05)
    raw: Optional[np.ndarray] = None

    def __post_init__(self):
        """Validate shape and range"""
        if self.dm.shape != (self.corner, self.corner):
            raise ValueError(f"Discovery matrix shape {self.dm.shape} does not match corner {self.corner}")
        cells = self.dm[np.tril_indices(self.corner)]
        if np.any(np.isnan(cells)) or np.any((cells < 0) | (cells > 1)):
            raise ValueError("Discovery matrix cells must lie in [0, 1]")
        self.alphas = tuple(sorted(self.alphas))

    def value(self, l: int, j: int) -> float:
        """DM_{l,j}, 1-based"""
        if not 1 <= j <= l <= self.corner:
            raise IndexError(f"Cell ({l}, {j}) outside the lower triangle of size {self.corner}")
        return float(self.dm[l - 1, j - 1])

    def row(self, l: int) -> np.ndarray:
        """(DM_{l,1}, ..., DM_{l,l})"""
        return self.dm[l - 1, :l]

    def cells(self) -> Iterator[Tuple[int, int, float]]:
        """(l, j, DM_{l,j}) in row-major order"""
        for l in range(1, self.corner + 1):
            for j in range(1, l + 1):
                yield l, j, float(self.dm[l - 1, j - 1])

    @property
    def cell_count(self) -> int:
        return self.corner * (self.corner + 1) // 2

    def is_monotone_in_j(self) -> bool:
        return all(np.all(np.diff(self.row(l)) >= 0) for l in range(1, self.corner + 1))

    def equals_raw(self) -> Optional[bool]:
        """Whether DM = DM' on every cell (None when DM' was not kept)"""
        if self.raw is None:
            return None
        lower = np.tril_indices(self.corner)
        return bool(np.array_equal(self.dm[lower], self.raw[lower]))

    def summary(self) -> "DiscoverySummary":
        from .matrix import true_discovery_lower_bound
        bounds = {str(alpha): [true_discovery_lower_bound(self, l, alpha)
                               for l in range(1, self.corner + 1)]
                  for alpha in self.alphas}
        return DiscoverySummary(self.method_tag, self.corner, list(self.alphas), bounds,
                                self.equals_raw())


@dataclass_json
@dataclass
class DiscoverySummary:
    """Lower bounds on true discoveries among the l smallest p-values, per alpha"""
    method_tag: str
    corner: int
    alphas: List[float] = field(default_factory=list)
    lower_bounds: dict = field(default_factory=dict)
    equals_raw: Optional[bool] = None
