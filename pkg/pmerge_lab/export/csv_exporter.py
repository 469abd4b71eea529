"""
CSV exporter for merging, discovery-matrix and simulation results
"""

import csv
import io
import logging
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, TextIO

import numpy as np

from pmerge_sdk.merging.methods import format_real
from pmerge_sdk.models.base_models import MCoefficients, MergeResult
from pmerge_lab.discovery import DiscoveryMatrix, categorize
from config.settings import get_export_config

logger = logging.getLogger(__name__)

MERGE_HEADER = ["method", "p", "accuracy_bound"]
COEFFICIENT_HEADER = ["r", "K", "c_r", "d_r", "b_rK", "residual"]
DM_HEADER = ["l", "j", "p"]
CATEGORY_HEADER = ["l", "j", "bucket"]
CDF_HEADER = ["threshold", "method", "fraction"]
EPSILON_HEADER = ["method", "K1", "epsilon"]
RATIO_HEADER = ["K", "gamma_K", "mstar_ratio"]


def merge_rows(results: Iterable[MergeResult]) -> List[list]:
    return [[r.method_tag, format_real(r.p), format_real(r.accuracy_bound)] for r in results]


def coefficient_rows(coefficients: Iterable[MCoefficients]) -> List[list]:
    return [[format_real(c.r), str(c.K), format_real(c.c_r), format_real(c.d_r),
             format_real(c.b_rK), format_real(c.residual)] for c in coefficients]


def dm_rows(dm: DiscoveryMatrix) -> List[list]:
    """One row per lower-triangle cell, l major"""
    return [[str(l), str(j), format_real(value)] for l, j, value in dm.cells()]


def category_rows(dm: DiscoveryMatrix, alphas: Optional[Sequence[float]] = None) -> List[list]:
    buckets = categorize(dm, alphas)
    return [[str(l), str(j), str(int(buckets[l - 1, j - 1]))] for l, j, _ in dm.cells()]


def cdf_rows(curves: Dict[str, np.ndarray]) -> List[list]:
    """Rows grouped by method, thresholds ascending within each method"""
    return [[format_real(t), name, format_real(fraction)]
            for name, curve in curves.items() for t, fraction in curve]


def epsilon_rows(epsilons: Dict[str, float], K1: int) -> List[list]:
    return [[name, str(K1), format_real(eps)] for name, eps in epsilons.items()]


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[str]],
              seed: Optional[int] = None):
    """
    Write RFC-4180 rows with LF line endings

    Args:
        stream: Text stream
        header: Column names
        rows: Data rows (already formatted)
        seed: Echoed as a "# seed=<seed>" line before the header when given
    """
    if seed is not None:
        stream.write(f"# seed={seed}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def to_csv_text(header: Sequence[str], rows: Iterable[Sequence[str]], seed: Optional[int] = None) -> str:
    buffer = io.StringIO()
    write_csv(buffer, header, rows, seed)
    return buffer.getvalue()


class ResultExporter:
    """
    CSV exporter for result tables

    Files are written to the configured output directory with a timestamp
    suffix; every table has a header row and numbers in shortest
    round-trip form.
    """

    def __init__(self, output_dir: Optional[str] = None, encoding: str = None,
                 timestamped: bool = True):
        """
        Initialize Result Exporter

        Args:
            output_dir: Output directory path (uses config default if not provided)
            encoding: File encoding (uses config default if not provided)
            timestamped: Append a _YYYYmmdd_HHMMSS suffix to file names
        """
        export_config = get_export_config()

        self.output_dir = Path(output_dir or export_config['output_dir'])
        self.encoding = encoding or export_config['csv_encoding']
        self.timestamped = timestamped

        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _generate_filepath(self, filename: str) -> Path:
        """
        Generate full file path, with timestamp if enabled

        Args:
            filename: Base filename (without extension)

        Returns:
            Path object with full file path
        """
        if self.timestamped:
            timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
            filename = f"{filename}_{timestamp}"
        return self.output_dir / f"{filename}.csv"

    def export_table(self, header: Sequence[str], rows: List[Sequence[str]], filename: str,
                     seed: Optional[int] = None) -> Path:
        """
        Write one table to a CSV file

        Returns:
            Path to the created CSV file

        Raises:
            Exception: If export fails
        """
        filepath = self._generate_filepath(filename)
        if not rows:
            logger.warning(f"No rows to export for {filename}; writing header only")

        logger.info(f"Exporting {len(rows)} rows to {filepath}")
        try:
            with open(filepath, 'w', newline='', encoding=self.encoding) as f:
                write_csv(f, header, rows, seed)
        except Exception as e:
            logger.error(f"Failed to export {filename} to CSV: {e}")
            raise
        return filepath

    def export_merge_results(self, results: List[MergeResult], filename: str) -> Path:
        return self.export_table(MERGE_HEADER, merge_rows(results), filename)

    def export_coefficients(self, coefficients: List[MCoefficients], filename: str) -> Path:
        return self.export_table(COEFFICIENT_HEADER, coefficient_rows(coefficients), filename)

    def export_discovery_matrix(self, dm: DiscoveryMatrix, filename: str,
                                seed: Optional[int] = None) -> List[Path]:
        """
        Export a discovery matrix and its categorized version

        Returns:
            Paths of the value file and the category file
        """
        return [
            self.export_table(DM_HEADER, dm_rows(dm), filename, seed),
            self.export_table(CATEGORY_HEADER, category_rows(dm), f"{filename}_categories", seed),
        ]

    def export_cdfs(self, curves: Dict[str, np.ndarray], filename: str, seed: Optional[int] = None) -> Path:
        return self.export_table(CDF_HEADER, cdf_rows(curves), filename, seed)

    def export_epsilons(self, epsilons: Dict[str, float], K1: int, filename: str) -> Path:
        return self.export_table(EPSILON_HEADER, epsilon_rows(epsilons, K1), filename)

    def export_multiple_matrices(self, matrices: Dict[str, DiscoveryMatrix], base_filename: str,
                                 seed: Optional[int] = None) -> List[Path]:
        """
        Export several discovery matrices, continuing past failures

        Args:
            matrices: Dictionary with keys as suffixes and DiscoveryMatrix as values
            base_filename: Base filename for all exports

        Returns:
            List of created file paths
        """
        created_files = []

        for suffix, dm in matrices.items():
            filename = f"{base_filename}_{suffix}"
            try:
                created_files.extend(self.export_discovery_matrix(dm, filename, seed))
            except Exception as e:
                logger.error(f"Failed to export {filename}: {e}")
                continue

        logger.info(f"Exported {len(created_files)} discovery-matrix files")
        return created_files

    def get_export_summary(self, dm: DiscoveryMatrix) -> dict:
        """
        Get export summary information for a discovery matrix

        Returns:
            Dictionary with summary information
        """
        summary = dm.summary().to_dict()
        summary.update({
            'output_dir': str(self.output_dir),
            'encoding': self.encoding,
            'export_timestamp': datetime.now().isoformat()
        })
        return summary
