"""Dataset ingestion, normalization and partitioning across parties.

CSV layout: one header row, comma separated, decimal points, UTF-8; every
column numeric; the last column is the regression target. The packaged
reference table (``data/housing.csv``, public domain) has 506 rows with 13
feature columns (crim, zn, indus, chas, nox, rm, age, dis, rad, tax,
ptratio, b, lstat) and the median home value ``medv`` as target.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataFormatError
from .regression import PartyDataset


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (N, d), target vector (N,), and the column names."""

    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...]
    target_name: str

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def bundled_housing_path() -> Path:
    """Path of the packaged reference CSV."""
    return Path(resources.files("mpcreg").joinpath("data/housing.csv"))


def load_csv(path) -> Dataset:
    """Parse a header+numeric CSV; last column is the target.

    Malformed rows raise :class:`DataFormatError` naming the offending
    1-based row number.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty") from None
        if len(header) < 2:
            raise DataFormatError(f"{path}: need at least one feature column and one target column")
        width = len(header)
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # ignore blank lines
            if len(row) != width:
                raise DataFormatError(f"{path}: row {lineno} has {len(row)} cells, expected {width}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {lineno} has a non-numeric cell") from exc
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return Dataset(
        features=data[:, :-1],
        targets=data[:, -1],
        feature_names=tuple(h.strip() for h in header[:-1]),
        target_name=header[-1].strip(),
    )


def minmax_stats(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-column minima and maxima over features and target (target last)."""
    stacked = np.column_stack([ds.features, ds.targets])
    return stacked.min(axis=0), stacked.max(axis=0)


def apply_minmax(ds: Dataset, stats: tuple[np.ndarray, np.ndarray]) -> Dataset:
    """Map every column into [0, 1] with the given stats; constant columns to 0."""
    lo, hi = stats
    span = np.where(hi > lo, hi - lo, 1.0)
    feats = (ds.features - lo[:-1]) / span[:-1]
    feats[:, hi[:-1] <= lo[:-1]] = 0.0
    targ = (ds.targets - lo[-1]) / span[-1]
    if hi[-1] <= lo[-1]:
        targ = np.zeros_like(targ)
    return Dataset(feats, targ, ds.feature_names, ds.target_name)


def normalize(ds: Dataset) -> Dataset:
    """Min-max normalization with stats taken over the whole dataset."""
    return apply_minmax(ds, minmax_stats(ds))


def with_bias(ds: Dataset) -> Dataset:
    """Append a constant-1 feature so the linear model carries an intercept."""
    ones = np.ones((ds.n_rows, 1))
    return Dataset(
        features=np.hstack([ds.features, ones]),
        targets=ds.targets,
        feature_names=ds.feature_names + ("bias",),
        target_name=ds.target_name,
    )


def train_test_split(ds: Dataset, train_frac: float, rng: np.random.Generator) -> tuple[Dataset, Dataset]:
    """Shuffle, then cut: train size is floor(train_frac * rows)."""
    if not 0.0 < train_frac < 1.0:
        raise ValueError("train fraction must lie strictly between 0 and 1")
    order = rng.permutation(ds.n_rows)
    n_train = int(train_frac * ds.n_rows)
    if n_train < 1 or n_train >= ds.n_rows:
        raise DataFormatError(f"split of {ds.n_rows} rows at {train_frac} leaves an empty side")
    tr, te = order[:n_train], order[n_train:]
    return (
        Dataset(ds.features[tr], ds.targets[tr], ds.feature_names, ds.target_name),
        Dataset(ds.features[te], ds.targets[te], ds.feature_names, ds.target_name),
    )


def partition_round_robin(train: Dataset, n_parties: int) -> list[PartyDataset]:
    """Deal training rows round-robin: party i takes rows i, i+n, i+2n, ..."""
    if n_parties < 1:
        raise ValueError("need at least one party")
    if train.n_rows < n_parties:
        raise DataFormatError(f"{train.n_rows} training rows cannot feed {n_parties} parties")
    return [
        PartyDataset(features=train.features[i::n_parties], targets=train.targets[i::n_parties], index=i + 1)
        for i in range(n_parties)
    ]


def split_and_partition(
    ds: Dataset,
    n_parties: int,
    train_frac: float,
    rng: np.random.Generator,
) -> tuple[list[PartyDataset], Dataset]:
    """Shuffled train/test split followed by round-robin dealing of the train rows."""
    train, test = train_test_split(ds, train_frac, rng)
    return partition_round_robin(train, n_parties), test
