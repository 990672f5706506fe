"""Synthetic data generation and CSV ingestion with standard preprocessing.

CSV files are comma-separated with a header row; '?' and empty cells count
as missing and drop the whole row.  Categorical columns are one-hot encoded
into 0-1 blocks, numeric columns are min-max scaled to [-1, 1] on the full
dataset before any fold splitting.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# First 50 digits of pi; source vectors for the synthetic separator.
PI_DIGITS = (
    3, 1, 4, 1, 5, 9, 2, 6, 5, 3,
    5, 8, 9, 7, 9, 3, 2, 3, 8, 4,
    6, 2, 6, 4, 3, 3, 8, 3, 2, 7,
    9, 5, 0, 2, 8, 8, 4, 1, 9, 7,
    1, 6, 9, 3, 9, 9, 3, 7, 5, 1,
)

MISSING_TOKENS = ("?", "")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with binary labels and optional fold assignments."""

    features: np.ndarray
    labels: np.ndarray
    name: str = "dataset"
    fold_assignments: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        if X.ndim != 2:
            raise ValueError("features must be 2-D")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite")
        if y.shape != (X.shape[0],) or not np.all(np.isin(y, (0, 1))):
            raise ValueError("labels must be a {0,1} vector matching the features")
        if self.fold_assignments is not None:
            folds = np.asarray(self.fold_assignments, dtype=np.int64)
            object.__setattr__(self, "fold_assignments", folds)
            if folds.shape != y.shape:
                raise ValueError("fold assignments must match the sample count")

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def d(self) -> int:
        return int(self.features.shape[1])


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic binary-classification sample."""

    d: int
    n: int
    keep_prob: float = 0.9
    seed: int = 0
    bayes_act: Union[str, Sequence[float]] = "pi-digits"

    def separator(self) -> np.ndarray:
        if isinstance(self.bayes_act, str):
            if self.bayes_act != "pi-digits":
                raise ValueError(f"unknown bayes_act {self.bayes_act!r}")
            if self.d > len(PI_DIGITS):
                raise ValueError(f"pi-digits separator supports d <= {len(PI_DIGITS)}")
            return np.array(PI_DIGITS[: self.d], dtype=np.float64)
        vec = np.asarray(self.bayes_act, dtype=np.float64)
        if vec.shape != (self.d,):
            raise ValueError("explicit bayes_act must have length d")
        return vec


def gen_synthetic(spec: SyntheticSpec) -> Dataset:
    """Draw X ~ N(0, I_d) and set Y = 1{separator . X > 0} * eps.

    ``eps`` is Bernoulli(keep_prob), so the label noise is one-sided: it
    only flips positives to 0.  Deterministic given ``spec.seed``.
    """
    if not 0.0 <= spec.keep_prob <= 1.0:
        raise ValueError("keep_prob must be a probability")
    h_star = spec.separator()
    rng = np.random.default_rng(spec.seed)
    X = rng.standard_normal((spec.n, spec.d))
    eps = rng.random(spec.n) < spec.keep_prob
    y = (((X @ h_star) > 0.0) & eps).astype(np.int64)
    return Dataset(features=X, labels=y, name=f"synthetic-d{spec.d}")


def _scale_numeric(col: np.ndarray) -> np.ndarray:
    lo, hi = float(col.min()), float(col.max())
    if hi == lo:
        # Degenerate range: midpoint convention, everything maps to 0.
        return np.zeros_like(col)
    return 2.0 * (col - lo) / (hi - lo) - 1.0


def load_csv(
    path,
    label_column: str,
    categorical_columns: Union[str, Sequence[str]] = "auto",
) -> Dataset:
    """Load a CSV into a preprocessed :class:`Dataset`.

    Rows with any missing cell are dropped first.  With
    ``categorical_columns="auto"``, exactly the non-numeric feature columns
    are treated as categorical (integer-coded categoricals must be listed
    explicitly; nothing is guessed).  Categoricals become one-hot 0-1
    blocks, numeric columns are min-max scaled to [-1, 1], and the label
    column must carry exactly two distinct values (mapped to 0/1 in sorted
    order).
    """
    path = Path(path)
    frame = pd.read_csv(path, na_values=list(MISSING_TOKENS), skipinitialspace=True)
    if label_column not in frame.columns:
        raise ValueError(f"label column {label_column!r} not in {list(frame.columns)}")
    frame = frame.dropna(axis=0).reset_index(drop=True)
    if len(frame) == 0:
        raise ValueError("no rows left after dropping missing values")

    label_values = sorted(frame[label_column].unique().tolist())
    if len(label_values) != 2:
        raise ValueError(f"labels must be binary, found {label_values}")
    labels = (frame[label_column] == label_values[1]).to_numpy(dtype=np.int64)

    feature_frame = frame.drop(columns=[label_column])
    if isinstance(categorical_columns, str):
        if categorical_columns != "auto":
            raise ValueError("categorical_columns must be 'auto' or a column list")
        categorical = [
            c
            for c in feature_frame.columns
            if not pd.api.types.is_numeric_dtype(feature_frame[c])
        ]
    else:
        categorical = list(categorical_columns)
        missing = set(categorical) - set(feature_frame.columns)
        if missing:
            raise ValueError(f"unknown categorical columns {sorted(missing)}")

    blocks = []
    for column in feature_frame.columns:
        col = feature_frame[column]
        if column in categorical:
            onehot = pd.get_dummies(col.astype(str), prefix=column, dtype=np.float64)
            blocks.append(onehot.to_numpy())
        else:
            if not pd.api.types.is_numeric_dtype(col):
                raise ValueError(
                    f"column {column!r} is non-numeric; list it as categorical"
                )
            blocks.append(_scale_numeric(col.to_numpy(dtype=np.float64))[:, None])
    features = np.hstack(blocks)
    return Dataset(features=features, labels=labels, name=path.stem)


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset in the same CSV format that :func:`load_csv` reads."""
    columns = [f"x{j}" for j in range(dataset.d)] + ["label"]
    frame = pd.DataFrame(
        np.column_stack([dataset.features, dataset.labels]), columns=columns
    )
    frame["label"] = frame["label"].astype(np.int64)
    frame.to_csv(path, index=False)


def make_folds(dataset: Dataset, k: int = 5, seed: int = 0) -> Dataset:
    """Assign each row to one of k near-equal folds by seeded permutation."""
    if dataset.n < k:
        raise ValueError(f"need at least {k} rows, got {dataset.n}")
    perm = np.random.default_rng(seed).permutation(dataset.n)
    assignments = np.empty(dataset.n, dtype=np.int64)
    assignments[perm] = np.arange(dataset.n) % k
    return Dataset(
        features=dataset.features,
        labels=dataset.labels,
        name=dataset.name,
        fold_assignments=assignments,
    )


def split_half(dataset: Dataset) -> tuple[Dataset, Dataset, int]:
    """Split into first/second halves in stored order; odd n drops the last row."""
    n = dataset.n
    if n % 2 == 1:
        logger.warning("odd sample count %d: dropping the final row before splitting", n)
        n -= 1
    m = n // 2
    first = Dataset(dataset.features[:m], dataset.labels[:m], name=dataset.name)
    second = Dataset(dataset.features[m:n], dataset.labels[m:n], name=dataset.name)
    return first, second, m
