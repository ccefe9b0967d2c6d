"""Tabular data loading and preprocessing.

Loads a CSV into an immutable split of protected attributes, unprotected
attributes, and binary labels.  Categorical columns are one-hot encoded
(keeping every category), numeric columns are min-max scaled into [-1, 1],
and the majority label class can be downsampled to balance the problem.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

MISSING_TOKENS = ["?", "NA", "N/A", "na", "n/a", ""]


@dataclass
class PreprocessConfig:
    """How to turn a raw table into a Dataset.

    protected / categorical name original CSV columns; label defaults to the
    last column.  positive_label fixes which raw label value maps to 1 (by
    default the lexicographically larger of the two observed values).
    """

    protected: list[str] = field(default_factory=list)
    categorical: list[str] = field(default_factory=list)
    label: str | None = None
    positive_label: str | None = None
    balance: bool = False
    seed: int = 0
    scaling: str = "minmax"  # "minmax" or "none"


@dataclass
class ColumnScale:
    """Min-max scaling metadata: scaled = (value - center) / half_range."""

    center: float
    half_range: float

    def apply(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.half_range == 0.0:
            return np.zeros_like(values)
        return (values - self.center) / self.half_range


@dataclass
class Dataset:
    """Immutable preprocessed table: protected x, unprotected xp, labels y."""

    x: np.ndarray
    xp: np.ndarray
    y: np.ndarray
    protected_names: list[str]
    unprotected_names: list[str]
    scales: dict[str, ColumnScale] = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.xp = np.asarray(self.xp, dtype=float)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.shape[0] != self.y.shape[0] or self.xp.shape[0] != self.y.shape[0]:
            raise ValueError("row counts of x, xp, y disagree")
        if not np.all((self.y == 0) | (self.y == 1)):
            raise ValueError("labels must be 0/1")
        if not np.any(self.y == 0):
            raise ValueError("dataset needs at least one negative row (y=0) "
                             "for false-positive rates to be defined")
        if np.any(np.abs(self.x) > 1.0 + 1e-12):
            raise ValueError("protected columns must be scaled into [-1, 1]")
        self.x.setflags(write=False)
        self.xp.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d_protected(self) -> int:
        return self.x.shape[1]

    @property
    def features(self) -> np.ndarray:
        """Full feature matrix X = (x, xp) seen by the learner."""
        return np.hstack([self.x, self.xp])

    def subset(self, rows: np.ndarray) -> "Dataset":
        return Dataset(
            self.x[rows], self.xp[rows], self.y[rows],
            list(self.protected_names), list(self.unprotected_names),
            dict(self.scales),
        )


def _binarize_labels(raw: pd.Series, positive_label: str | None) -> np.ndarray:
    values = raw.astype(str).str.strip()
    distinct = sorted(values.unique())
    if positive_label is not None:
        positive = str(positive_label)
        if positive not in distinct:
            raise ValueError(f"positive label {positive!r} not found in label column")
        if len(distinct) > 2:
            raise ValueError(f"label column has {len(distinct)} distinct values; expected 2")
        return (values == positive).to_numpy(dtype=np.int64)
    # Accept numeric 0/1 (however formatted) without an explicit mapping.
    try:
        numeric = raw.astype(float)
        if set(np.unique(numeric)) <= {0.0, 1.0}:
            return numeric.to_numpy(dtype=np.int64)
    except (ValueError, TypeError):
        pass
    if len(distinct) != 2:
        raise ValueError(f"label column is not binary: values {distinct[:5]}")
    # Deterministic default: lexicographically larger value is the positive class.
    return (values == distinct[1]).to_numpy(dtype=np.int64)


def load_csv(path, config: PreprocessConfig) -> Dataset:
    """Load, encode, scale, and split a CSV per the preprocessing config.

    Rows with missing cells are dropped (with a warning).  Each categorical
    column becomes one 0/1 column per observed category; every other feature
    column is scaled to [-1, 1] by (v - midpoint) / half_range.  A constant
    column has half-range 0 and maps to all zeros, with a warning.
    """
    frame = pd.read_csv(path, skipinitialspace=True,
                        na_values=MISSING_TOKENS, keep_default_na=True)
    if frame.shape[0] < 1:
        raise ValueError(f"{path}: no data rows")
    columns = list(frame.columns)

    label_col = config.label if config.label is not None else columns[-1]
    for name in [label_col, *config.protected, *config.categorical]:
        if name not in columns:
            raise ValueError(f"column {name!r} not present in {path}")

    n_raw = len(frame)
    frame = frame.dropna()
    if len(frame) < n_raw:
        warnings.warn(f"dropped {n_raw - len(frame)} rows with missing values")
    if len(frame) == 0:
        raise ValueError(f"{path}: every row has missing values")

    y = _binarize_labels(frame[label_col], config.positive_label)

    protected_cols: list[tuple[str, np.ndarray]] = []
    unprotected_cols: list[tuple[str, np.ndarray]] = []
    scales: dict[str, ColumnScale] = {}

    for name in columns:
        if name == label_col:
            continue
        out = protected_cols if name in config.protected else unprotected_cols
        series = frame[name]
        if name in config.categorical:
            cats = sorted(series.astype(str).str.strip().unique())
            for cat in cats:
                col_name = f"{name}={cat}"
                values = (series.astype(str).str.strip() == cat).to_numpy(dtype=float)
                scales[col_name] = ColumnScale(0.0, 1.0)
                out.append((col_name, values))
        else:
            try:
                values = series.astype(float).to_numpy()
            except (ValueError, TypeError) as exc:
                raise ValueError(f"column {name!r} has unparseable numeric cells") from exc
            if config.scaling == "minmax":
                lo, hi = float(values.min()), float(values.max())
                scale = ColumnScale((hi + lo) / 2.0, (hi - lo) / 2.0)
                if scale.half_range == 0.0:
                    warnings.warn(f"column {name!r} is constant; scaled to all zeros")
                scales[name] = scale
                values = scale.apply(values)
            else:
                scales[name] = ColumnScale(0.0, 1.0)
            out.append((name, values))

    def stack(cols):
        if not cols:
            return np.empty((len(frame), 0))
        return np.column_stack([v for _, v in cols])

    data = Dataset(
        x=stack(protected_cols),
        xp=stack(unprotected_cols),
        y=y,
        protected_names=[name for name, _ in protected_cols],
        unprotected_names=[name for name, _ in unprotected_cols],
        scales=scales,
    )
    if config.balance:
        data = balance_labels(data, config.seed)
    return data


def balance_labels(data: Dataset, seed: int) -> Dataset:
    """Downsample the majority label class to the minority count.

    Sampling is uniform without replacement with the given seed; surviving
    rows keep their original order, so results are deterministic.
    """
    neg = np.flatnonzero(data.y == 0)
    pos = np.flatnonzero(data.y == 1)
    if len(neg) == 0 or len(pos) == 0:
        raise ValueError("both label classes must be present to balance")
    if len(neg) == len(pos):
        return data
    majority, minority = (neg, pos) if len(neg) > len(pos) else (pos, neg)
    rng = np.random.default_rng(seed)
    kept_majority = rng.choice(majority, size=len(minority), replace=False)
    keep = np.sort(np.concatenate([minority, kept_majority]))
    return data.subset(keep)


def make_gerrymander_fixture() -> Dataset:
    """The canonical 8-row two-attribute parity dataset.

    One row per (race, gender, label) cell with race and gender protected and
    encoded as +/-1.  The race*gender product ships as an unprotected feature
    so the cross-cell parity classifier (positive exactly on one diagonal of
    the 2x2 attribute grid) is expressible as a linear threshold.
    """
    rows = []
    for race in (1.0, -1.0):        # +1 = blue, -1 = green
        for gender in (1.0, -1.0):  # +1 = man,  -1 = woman
            for label in (0, 1):
                rows.append((race, gender, race * gender, label))
    arr = np.array(rows)
    return Dataset(
        x=arr[:, 0:2],
        xp=arr[:, 2:3],
        y=arr[:, 3],
        protected_names=["race", "gender"],
        unprotected_names=["race_gender"],
        scales={
            "race": ColumnScale(0.0, 1.0),
            "gender": ColumnScale(0.0, 1.0),
            "race_gender": ColumnScale(0.0, 1.0),
        },
    )


def parity_classifier():
    """The fixture's cross-cell classifier: positive iff race*gender = +1."""
    from .regression_oracle import LinearThreshold

    return LinearThreshold(np.array([0.0, 0.0, 1.0]), 0.0)


def fixture_frame() -> pd.DataFrame:
    """The gerrymander fixture as a raw table (for CSV emission)."""
    data = make_gerrymander_fixture()
    return pd.DataFrame({
        "race": data.x[:, 0],
        "gender": data.x[:, 1],
        "race_gender": data.xp[:, 0],
        "label": data.y,
    })
