"""Dataset generation and ingestion."""

from .lotka_volterra import LvParams, lv_step, simulate_lotka_volterra
from .synthetic import FairSynthConfig, gen_correlated_gaussians, gen_fair_synthetic
from .tabular import (
    ColumnSpec,
    CsvSchema,
    DataError,
    Dataset,
    SplitSpec,
    adult_schema,
    covertype_schema,
    load_csv_dataset,
    split,
)

__all__ = [
    "ColumnSpec",
    "CsvSchema",
    "DataError",
    "Dataset",
    "FairSynthConfig",
    "LvParams",
    "SplitSpec",
    "adult_schema",
    "covertype_schema",
    "gen_correlated_gaussians",
    "gen_fair_synthetic",
    "load_csv_dataset",
    "lv_step",
    "simulate_lotka_volterra",
    "split",
]
