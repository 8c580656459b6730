"""Column-typed datasets: CSV ingestion, one-hot encoding, splitting.

A Dataset keeps logical columns (continuous, binary, categorical) with role
tags saying how downstream code should treat them. Categorical values are
stored as integer codes against a fixed category list; encoded matrices are
built on demand. Standardization statistics are computed from the training
split only and copied onto the test split.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from ..numerics import make_rng

log = logging.getLogger(__name__)

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"
BINARY = "binary"
LABEL_GROUP = "label_group"  # several 0/1 source columns collapsing to one label

ROLES = ("feature", "target", "protected", "domain", "drop")


class DataError(ValueError):
    """Schema violations, malformed files, impossible splits."""


@dataclass
class ColumnSpec:
    name: str
    kind: str
    role: str = "feature"
    categories: tuple[str, ...] | None = None
    members: tuple[str, ...] | None = None  # label_group source columns
    mean: float | None = None  # set once a training split fixes the statistics
    std: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (CONTINUOUS, CATEGORICAL, BINARY, LABEL_GROUP):
            raise DataError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.role not in ROLES:
            raise DataError(f"column {self.name!r}: unknown role {self.role!r}")
        if self.kind == LABEL_GROUP and not self.members:
            raise DataError(f"column {self.name!r}: label_group needs member columns")

    @property
    def width(self) -> int:
        """Encoded width when the column appears in a matrix."""
        if self.kind == CATEGORICAL:
            return len(self.categories or ())
        return 1


@dataclass
class Dataset:
    columns: list[ColumnSpec]
    arrays: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        lengths = {self.arrays[n].shape[0] for n in names}
        if len(lengths) > 1:
            raise DataError(f"column lengths disagree: {sorted(lengths)}")

    @property
    def n_rows(self) -> int:
        if not self.columns:
            return 0
        return self.arrays[self.columns[0].name].shape[0]

    def spec(self, name: str) -> ColumnSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise DataError(f"no column named {name!r}")

    def column(self, name: str) -> np.ndarray:
        """Raw stored values: floats, or integer codes for categoricals."""
        self.spec(name)
        return self.arrays[name]

    def matrix(self, roles=("feature",)) -> np.ndarray:
        """Encoded float matrix over the columns with the given roles.

        Continuous columns are z-scored when statistics are set, categorical
        columns one-hot expanded; a negative code (unseen category) encodes
        as an all-zero group.
        """
        blocks = []
        for c in self.columns:
            if c.role not in roles:
                continue
            v = self.arrays[c.name]
            if c.kind == CONTINUOUS:
                col = v.astype(np.float64)
                if c.mean is not None:
                    col = (col - c.mean) / c.std
                blocks.append(col[:, None])
            elif c.kind == BINARY:
                blocks.append(v.astype(np.float64)[:, None])
            else:
                codes = v.astype(np.int64)
                hot = np.zeros((codes.size, c.width))
                seen = codes >= 0
                hot[np.nonzero(seen)[0], codes[seen]] = 1.0
                blocks.append(hot)
        if not blocks:
            raise DataError(f"no columns with roles {roles}")
        return np.concatenate(blocks, axis=1)

    def labels(self, role: str) -> np.ndarray:
        """Integer class codes of the single categorical/binary column with this role."""
        cols = [c for c in self.columns if c.role == role]
        if len(cols) != 1:
            raise DataError(f"expected exactly one {role!r} column, found {len(cols)}")
        c = cols[0]
        if c.kind == CONTINUOUS:
            raise DataError(f"column {c.name!r} is continuous, not a label")
        return self.arrays[c.name].astype(np.int64)

    def take(self, idx: np.ndarray) -> "Dataset":
        return Dataset(columns=[replace(c) for c in self.columns],
                       arrays={n: a[idx] for n, a in self.arrays.items()})


@dataclass
class CsvSchema:
    """Column layout of a source file, in file order.

    A label_group entry stands in place of its member columns. With
    has_header the file's header must contain every named source column;
    without, the expanded names are assigned positionally.
    """
    columns: list[ColumnSpec]
    has_header: bool = True
    unknown_token: str | None = None  # e.g. "?" mapped to unknown_label
    unknown_label: str = "Unknown"
    strip_trailing_period: bool = False

    def source_names(self) -> list[str]:
        names = []
        for c in self.columns:
            names.extend(c.members if c.kind == LABEL_GROUP else (c.name,))
        return names


@dataclass
class SplitSpec:
    mode: str  # iid | by_domain
    train_n: int | None = None
    test_n: int | None = None
    seed: int = 0
    train_domains: tuple[int, ...] | None = None
    test_domains: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode == "iid":
            if not self.train_n or not self.test_n:
                raise DataError("iid split needs train_n and test_n")
        elif self.mode == "by_domain":
            if not self.train_domains or not self.test_domains:
                raise DataError("by_domain split needs both domain lists")
            if set(self.train_domains) & set(self.test_domains):
                raise DataError("train and test domains overlap")
        else:
            raise DataError(f"unknown split mode {self.mode!r}")


def _clean_strings(series: pd.Series, schema: CsvSchema) -> pd.Series:
    s = series.astype(str).str.strip()
    if schema.strip_trailing_period:
        s = s.str.rstrip(".")
    if schema.unknown_token is not None:
        s = s.replace(schema.unknown_token, schema.unknown_label)
    return s


def load_csv_dataset(path, schema: CsvSchema) -> Dataset:
    """Read a comma-separated file against a schema into a typed Dataset.

    Rows with missing values are dropped (count logged). Categorical codes
    come from the spec's category list when given, else from the sorted
    distinct values in the file; a value outside a fixed list codes as -1
    and one-hot encodes to an all-zero group, with a warning.
    """
    names = schema.source_names()
    if schema.has_header:
        df = pd.read_csv(path, skipinitialspace=True)
        df.columns = [str(c).strip() for c in df.columns]
        missing_cols = [n for n in names if n not in df.columns]
        if missing_cols:
            raise DataError(f"{path}: header lacks columns {missing_cols}")
        df = df[names]
    else:
        df = pd.read_csv(path, header=None, names=names, skipinitialspace=True)

    before = len(df)
    df = df.dropna()
    dropped = before - len(df)
    if dropped:
        log.warning("%s: dropped %d rows with missing values", path, dropped)
    if len(df) == 0:
        raise DataError(f"{path}: no complete rows")

    columns: list[ColumnSpec] = []
    arrays: dict[str, np.ndarray] = {}
    for spec in schema.columns:
        if spec.role == "drop":
            continue
        if spec.kind == CONTINUOUS:
            try:
                arr = df[spec.name].to_numpy(dtype=np.float64)
            except (TypeError, ValueError) as exc:
                raise DataError(f"column {spec.name!r}: non-numeric values") from exc
            columns.append(replace(spec))
            arrays[spec.name] = arr
        elif spec.kind == LABEL_GROUP:
            block = df[list(spec.members)].to_numpy(dtype=np.float64)
            if not np.all(block.sum(axis=1) == 1.0):
                raise DataError(f"group {spec.name!r}: indicator rows must sum to 1")
            columns.append(ColumnSpec(name=spec.name, kind=CATEGORICAL, role=spec.role,
                                      categories=tuple(spec.members)))
            arrays[spec.name] = np.argmax(block, axis=1).astype(np.int64)
        else:
            values = _clean_strings(df[spec.name], schema)
            if spec.categories is None:
                cats = tuple(sorted(values.unique()))
            else:
                cats = tuple(spec.categories)
            if spec.kind == BINARY and len(cats) != 2:
                raise DataError(f"column {spec.name!r}: binary needs 2 categories, got {len(cats)}")
            code_of = {c: i for i, c in enumerate(cats)}
            codes = values.map(code_of).fillna(-1).to_numpy(dtype=np.int64)
            unseen = int(np.sum(codes < 0))
            if unseen:
                warnings.warn(
                    f"column {spec.name!r}: {unseen} values outside the known "
                    f"categories encode as zeros", stacklevel=2)
            columns.append(replace(spec, categories=cats))
            arrays[spec.name] = codes
    return Dataset(columns=columns, arrays=arrays)


def _apply_train_stats(train: Dataset, other: Dataset) -> None:
    for c_train, c_other in zip(train.columns, other.columns):
        if c_train.kind != CONTINUOUS or c_train.role != "feature":
            continue
        v = train.arrays[c_train.name]
        mean = float(np.mean(v))
        std = float(np.std(v))
        if std == 0.0:
            std = 1.0  # constant column: shift only
        c_train.mean = c_other.mean = mean
        c_train.std = c_other.std = std


def split(dataset: Dataset, spec: SplitSpec,
          standardize: bool = True) -> tuple[Dataset, Dataset]:
    """Partition into train/test; optionally fix feature statistics from train."""
    if spec.mode == "iid":
        total = spec.train_n + spec.test_n
        if total > dataset.n_rows:
            raise DataError(f"split wants {total} rows, dataset has {dataset.n_rows}")
        perm = make_rng(spec.seed).permutation(dataset.n_rows)
        train = dataset.take(perm[:spec.train_n])
        test = dataset.take(perm[spec.train_n:total])
    else:
        domain = dataset.labels("domain")
        train_mask = np.isin(domain, spec.train_domains)
        test_mask = np.isin(domain, spec.test_domains)
        if not train_mask.any() or not test_mask.any():
            raise DataError("a requested domain matches no rows")
        train = dataset.take(np.nonzero(train_mask)[0])
        test = dataset.take(np.nonzero(test_mask)[0])
    if standardize:
        _apply_train_stats(train, test)
    return train, test


ADULT_COLUMNS = [
    ColumnSpec("age", CONTINUOUS),
    ColumnSpec("workclass", CATEGORICAL),
    ColumnSpec("fnlwgt", CONTINUOUS, role="drop"),
    ColumnSpec("education", CATEGORICAL),
    ColumnSpec("education-num", CONTINUOUS),
    ColumnSpec("marital-status", CATEGORICAL),
    ColumnSpec("occupation", CATEGORICAL),
    ColumnSpec("relationship", CATEGORICAL),
    ColumnSpec("race", CATEGORICAL),
    ColumnSpec("sex", BINARY, role="protected", categories=("Female", "Male")),
    ColumnSpec("capital-gain", CONTINUOUS),
    ColumnSpec("capital-loss", CONTINUOUS),
    ColumnSpec("hours-per-week", CONTINUOUS),
    ColumnSpec("native-country", CATEGORICAL),
    ColumnSpec("income", BINARY, role="target", categories=("<=50K", ">50K")),
]


def adult_schema(has_header: bool = False) -> CsvSchema:
    """Census income file: 105 encoded feature dims, gender protected, income target."""
    return CsvSchema(columns=[replace(c) for c in ADULT_COLUMNS],
                     has_header=has_header, unknown_token="?",
                     strip_trailing_period=True)


_COVERTYPE_CONTINUOUS = (
    "Elevation", "Aspect", "Slope",
    "Horizontal_Distance_To_Hydrology", "Vertical_Distance_To_Hydrology",
    "Horizontal_Distance_To_Roadways", "Hillshade_9am", "Hillshade_Noon",
    "Hillshade_3pm", "Horizontal_Distance_To_Fire_Points",
)


def covertype_schema(has_header: bool = False) -> CsvSchema:
    """Forest cover file: 50 feature dims, wilderness area as the domain label.

    The four wilderness indicators collapse to one label and stay out of the
    feature block; the forty soil indicators remain binary features.
    """
    cols = [ColumnSpec(n, CONTINUOUS) for n in _COVERTYPE_CONTINUOUS]
    cols.append(ColumnSpec("wilderness", LABEL_GROUP, role="domain",
                           members=tuple(f"Wilderness_Area{i}" for i in range(1, 5))))
    cols.extend(ColumnSpec(f"Soil_Type{i}", BINARY, categories=("0", "1"))
                for i in range(1, 41))
    cols.append(ColumnSpec("Cover_Type", CATEGORICAL, role="target",
                           categories=tuple(str(i) for i in range(1, 8))))
    return CsvSchema(columns=cols, has_header=has_header)
