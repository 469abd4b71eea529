"""CSV export of result tables"""

from .csv_exporter import (
    MERGE_HEADER,
    COEFFICIENT_HEADER,
    DM_HEADER,
    CATEGORY_HEADER,
    CDF_HEADER,
    EPSILON_HEADER,
    RATIO_HEADER,
    ResultExporter,
    write_csv,
    to_csv_text,
    merge_rows,
    coefficient_rows,
    dm_rows,
    category_rows,
    cdf_rows,
    epsilon_rows,
)

__all__ = [
    "MERGE_HEADER",
    "COEFFICIENT_HEADER",
    "DM_HEADER",
    "CATEGORY_HEADER",
    "CDF_HEADER",
    "EPSILON_HEADER",
    "RATIO_HEADER",
    "ResultExporter",
    "write_csv",
    "to_csv_text",
    "merge_rows",
    "coefficient_rows",
    "dm_rows",
    "category_rows",
    "cdf_rows",
    "epsilon_rows",
]
