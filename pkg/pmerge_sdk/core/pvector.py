"""
P-value vectors and the generic adjustments of merging functions
"""

import csv
import logging
import math
from pathlib import Path
from typing import Callable, Iterable, Union

import numpy as np

from ..models.base_models import (
    PVector,
    CSVParseError,
    InvalidPValueError,
    NonMonotoneError,
)
from config.settings import get_solver_config

logger = logging.getLogger(__name__)

MergeFunction = Callable[[PVector], float]
PVectorLike = Union[PVector, np.ndarray, Iterable[float]]


def validate_pvector(raw: PVectorLike) -> PVector:
    """
    Validate raw input into a PVector

    Args:
        raw: Sequence of at least two finite nonnegative reals

    Returns:
        PVector instance

    Raises:
        LengthError: If fewer than two entries
        InvalidPValueError: If an entry is negative, NaN or infinite
    """
    if isinstance(raw, PVector):
        return raw
    return PVector(np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float))


def zero_one_adjust(F: MergeFunction, p: PVectorLike) -> float:
    """
    Zero-one adjusted version of a merging function

    Returns 0 when some p_k = 0, otherwise F(p ^ 1) ^ 1.
    """
    p = validate_pvector(p)
    if p.min == 0.0:
        return 0.0
    return min(float(F(p.clipped())), 1.0)


def lsc_version(F: MergeFunction, p: PVectorLike, shrink_steps: int = None,
                tolerance: float = None) -> float:
    """
    Lower semicontinuous version lim_{lambda -> 1-} F(lambda p)

    F is sampled at lambda = 1 - 2^-s for s = 1..shrink_steps. If the last
    increments account for the remaining gap to F(p), F is left-continuous at
    p and F(p) is returned; otherwise the left limit is returned.

    Args:
        F: Increasing merging function
        p: Input vector
        shrink_steps: Number of lambda values (config default 30)
        tolerance: Allowed decrease between consecutive samples (config default 1e-12)

    Raises:
        NonMonotoneError: If the sampled sequence decreases beyond tolerance
    """
    solver_config = get_solver_config()
    steps = shrink_steps or solver_config["lsc_shrink_steps"]
    tol = solver_config["lsc_tolerance"] if tolerance is None else tolerance
    p = validate_pvector(p)

    samples = []
    for s in range(1, steps + 1):
        lam = 1.0 - math.ldexp(1.0, -s)
        samples.append(float(F(p.scaled(lam))))
        if len(samples) > 1 and samples[-1] < samples[-2] - tol:
            raise NonMonotoneError(
                f"F decreased from {samples[-2]!r} to {samples[-1]!r} at lambda={lam!r}",
                {"step": s},
            )

    at_p = float(F(p))
    if at_p < samples[-1] - tol:
        raise NonMonotoneError(f"F(p)={at_p!r} is below F(lambda p)={samples[-1]!r}")

    last_increment = samples[-1] - samples[-2] if len(samples) > 1 else 0.0
    if at_p - samples[-1] <= 2.0 * last_increment + tol:
        return at_p
    logger.debug(f"Left limit {samples[-1]!r} differs from F(p)={at_p!r}")
    return samples[-1]


def read_pvector_csv(path: Union[str, Path]) -> PVector:
    """
    Read one p-value per line, with an optional "p" header

    Blank lines and lines starting with '#' are skipped.

    Raises:
        CSVParseError: On an unparseable line (reports the line number)
        InvalidPValueError: On a negative or non-finite value
    """
    values = []
    with open(path, "r", newline="", encoding="utf-8") as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
                continue
            cell = row[0].strip()
            if not values and line_number == 1 and cell.lower() == "p":
                continue
            if len(row) > 1 and any(c.strip() for c in row[1:]):
                raise CSVParseError(f"Line {line_number}: expected one value per line", line_number)
            try:
                value = float(cell)
            except ValueError:
                raise CSVParseError(f"Line {line_number}: cannot parse {cell!r} as a number", line_number)
            if not math.isfinite(value) or value < 0:
                raise InvalidPValueError(f"Line {line_number}: invalid p-value {cell!r}",
                                         {"line_number": line_number})
            values.append(value)

    logger.debug(f"Read {len(values)} p-values from {path}")
    return validate_pvector(values)
