"""
Tests for row formatting and the CSV result exporter
"""

import logging
import re

import numpy as np
import pytest

from pmerge_lab.discovery import DiscoveryMatrix
from pmerge_lab.export import (
    CDF_HEADER,
    MERGE_HEADER,
    ResultExporter,
    category_rows,
    cdf_rows,
    coefficient_rows,
    dm_rows,
    epsilon_rows,
    merge_rows,
    to_csv_text,
)
from pmerge_sdk.merging import solve_m_coefficients
from pmerge_sdk.models.base_models import MergeResult


@pytest.fixture
def small_dm():
    dm = np.full((2, 2), np.nan)
    dm[0, 0] = 0.004
    dm[1, :2] = [0.004, 0.03]
    return DiscoveryMatrix(2, dm, "hommel")


@pytest.fixture
def exporter(tmp_path):
    return ResultExporter(str(tmp_path), timestamped=False)


class TestRows:

    def test_merge_rows(self):
        rows = merge_rows([MergeResult(0.055, "hommel"), MergeResult(1.0, "induced:M=52", 2.0 ** -52)])
        assert rows[0] == ["hommel", "0.055", "0"]
        assert rows[1] == ["induced:M=52", "1", repr(2.0 ** -52)]

    def test_coefficient_rows(self):
        assert coefficient_rows([solve_m_coefficients(1.0, 3)]) == [["1", "3", "0", "1", "2", "0"]]

    def test_dm_rows(self, small_dm):
        assert dm_rows(small_dm) == [["1", "1", "0.004"], ["2", "1", "0.004"], ["2", "2", "0.03"]]

    def test_category_rows(self, small_dm):
        assert [row[2] for row in category_rows(small_dm)] == ["0", "0", "1"]
        assert [row[2] for row in category_rows(small_dm, [0.001, 0.01])] == ["1", "1", "2"]

    def test_cdf_rows(self):
        curves = {"simes": np.array([[0.0, 0.0], [0.5, 0.25], [1.0, 1.0]])}
        assert cdf_rows(curves) == [["0", "simes", "0"], ["0.5", "simes", "0.25"], ["1", "simes", "1"]]

    def test_epsilon_rows(self):
        assert epsilon_rows({"bonferroni": 1e-5}, 1000) == [["bonferroni", "1000", "1e-05"]]


class TestCsvText:

    def test_seed_line_comes_first(self):
        text = to_csv_text(MERGE_HEADER, [["simes", "0.5", "0"]], seed=7)
        assert text == "# seed=7\nmethod,p,accuracy_bound\nsimes,0.5,0\n"

    def test_no_seed_line(self):
        assert to_csv_text(["a"], []).splitlines() == ["a"]

    def test_quoting(self):
        assert to_csv_text(["a"], [["x,y"]]) == 'a\n"x,y"\n'


class TestResultExporter:

    def test_merge_results(self, exporter, tmp_path):
        path = exporter.export_merge_results([MergeResult(0.3, "bonferroni")], "merge")
        assert path == tmp_path / "merge.csv"
        assert path.read_text() == "method,p,accuracy_bound\nbonferroni,0.3,0\n"

    def test_timestamped_names(self, tmp_path):
        path = ResultExporter(str(tmp_path)).export_coefficients([solve_m_coefficients(0.0, 4)], "coeffs")
        assert re.fullmatch(r"coeffs_\d{8}_\d{6}\.csv", path.name)

    def test_creates_the_directory(self, tmp_path):
        target = tmp_path / "nested" / "out"
        ResultExporter(str(target), timestamped=False)
        assert target.is_dir()

    def test_discovery_matrix_writes_two_files(self, exporter, small_dm):
        value_path, category_path = exporter.export_discovery_matrix(small_dm, "dm", seed=11)
        assert value_path.name == "dm.csv"
        assert category_path.name == "dm_categories.csv"
        lines = value_path.read_text().splitlines()
        assert lines[:2] == ["# seed=11", "l,j,p"]
        assert len(lines) == 2 + small_dm.cell_count
        assert category_path.read_text().splitlines()[1] == "l,j,bucket"

    def test_cdfs(self, exporter):
        curves = {"bonferroni": np.array([[0.0, 0.0], [1.0, 1.0]])}
        path = exporter.export_cdfs(curves, "cdf", seed=3)
        assert path.read_text().splitlines()[1] == ",".join(CDF_HEADER)

    def test_epsilons(self, exporter):
        path = exporter.export_epsilons({"hommel": 6.9e-10}, 1000, "eps")
        assert path.read_text().splitlines()[1] == "hommel,1000,6.9e-10"

    def test_empty_table_warns(self, exporter, caplog):
        path = exporter.export_table(MERGE_HEADER, [], "empty")
        assert path.read_text() == "method,p,accuracy_bound\n"
        assert any("header only" in r.message for r in caplog.records if r.levelno == logging.WARNING)

    def test_multiple_matrices_skip_failures(self, exporter, small_dm, caplog):
        paths = exporter.export_multiple_matrices({"a": small_dm, "broken": None, "b": small_dm}, "run")
        assert sorted(p.name for p in paths) == ["run_a.csv", "run_a_categories.csv",
                                                  "run_b.csv", "run_b_categories.csv"]
        assert any("run_broken" in r.message for r in caplog.records)

    def test_export_summary(self, exporter, small_dm, tmp_path):
        summary = exporter.get_export_summary(small_dm)
        assert summary["output_dir"] == str(tmp_path)
        assert summary["corner"] == 2
        assert summary["lower_bounds"]["0.05"] == [1, 2]
        assert "export_timestamp" in summary
