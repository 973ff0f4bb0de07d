"""Datasets: XOR-family generator, CSV I/O, class balancing and CV splits."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.model_selection import StratifiedKFold

from .labels import maxmin_directions, min_pairwise_angle


class DataError(ValueError):
    """Invalid, missing or malformed data."""


@dataclass
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    label_names: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).ravel()
        if self.features.shape[0] != self.labels.shape[0]:
            raise DataError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if not np.all(np.isfinite(self.features)):
            raise DataError("features contain NaN or Inf")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise DataError(f"labels must lie in [0, {self.n_classes})")
        counts = np.bincount(self.labels, minlength=self.n_classes)
        if np.any(counts == 0):
            raise DataError(f"classes {np.flatnonzero(counts == 0).tolist()} have no rows")
        if not self.label_names:
            self.label_names = [str(c) for c in range(self.n_classes)]

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def subset(self, index):
        index = np.asarray(index, dtype=int)
        return Dataset(
            self.name,
            self.features[index],
            self.labels[index],
            self.n_classes,
            list(self.label_names),
            dict(self.metadata),
        )

    def summary(self):
        return {
            "name": self.name,
            "n_samples": self.n_samples,
            "n_features": self.n_features,
            "n_classes": self.n_classes,
        }


def max_xor_classes(n_features):
    """Most classes the XOR generator accepts in ``n_features`` dimensions.

    This is the absolute bound ``N (N + 1) / 2`` on equiangular lines; past it
    the antipodal class directions cannot stay evenly separated.
    """
    return n_features * (n_features + 1) // 2


def generate_xor(n_classes, n_features, points_per_class, spread=0.2, seed=0):
    """XOR-style data where each class sits on an antipodal pair of clusters.

    Class ``c`` is centred on the line through a unit direction ``u_c``;
    the class directions are spread as far apart as possible (as lines).
    Points alternate between ``+u_c`` and ``-u_c``, get a Gaussian tangent
    perturbation of scale ``spread`` (radians) and are projected back to the
    unit sphere. Rows are grouped by class.
    """
    L, N, P = int(n_classes), int(n_features), int(points_per_class)
    if L < 2:
        raise DataError(f"need at least two classes, got {L}")
    if N < 2:
        raise DataError(f"need at least two features for distinct directions, got {N}")
    if L > max_xor_classes(N):
        raise DataError(
            f"{L} classes cannot be separated as antipodal pairs in {N} dimensions "
            f"(at most {max_xor_classes(N)})"
        )
    if P < 1:
        raise DataError("points_per_class must be positive")
    if spread < 0:
        raise DataError("spread must be non-negative")
    dir_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
    dirs = maxmin_directions(L, N, seed=dir_seed, antipodal=True)
    rng = np.random.default_rng(noise_seed)
    X = np.empty((L * P, N))
    y = np.repeat(np.arange(L), P)
    for c in range(L):
        u = dirs[c]
        for j in range(P):
            sign = 1.0 if j % 2 == 0 else -1.0
            # Tangent noise with RMS angle ``spread`` whatever the dimension.
            g = rng.normal(0.0, spread / np.sqrt(N - 1), N)
            g -= (g @ u) * u
            x = sign * u + g
            X[c * P + j] = x / np.linalg.norm(x)
    meta = {
        "generator": "xor",
        "spread": float(spread),
        "seed": seed,
        "directions": dirs.tolist(),
        "min_pair_separation": min_pairwise_angle(dirs, antipodal=True),
    }
    return Dataset(f"xor-{L}", X, y, L, metadata=meta)


def save_csv(dataset, path, label_column="label"):
    """Write ``dataset`` as a header-row CSV; floats are written round-trippably."""
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"f{k}" for k in range(dataset.n_features)] + [label_column])
            for row, lab in zip(dataset.features, dataset.labels):
                w.writerow([repr(float(v)) for v in row] + [dataset.label_names[lab]])
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc
    return path


def _parse_labels(raw):
    try:
        ints = [int(v) for v in raw]
    except ValueError:
        names = list(dict.fromkeys(raw))
    else:
        names = [str(v) for v in sorted(set(ints))]
        raw = [str(v) for v in ints]
    lookup = {n: i for i, n in enumerate(names)}
    return np.array([lookup[v] for v in raw], dtype=int), names


def load_csv(path, feature_columns=None, label_column="label", name=None):
    """Read a dataset from a UTF-8 CSV file with a header row.

    Integer labels are mapped to ``0..L-1`` in sorted order; string labels
    in first-seen order. ``feature_columns`` defaults to every column other
    than ``label_column``.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]
    if not body:
        raise DataError(f"{path} has a header but no data rows")
    if label_column not in header:
        raise DataError(f"{path}: label column {label_column!r} not in header {header}")
    if feature_columns is None:
        feature_columns = [h for h in header if h != label_column]
    missing = [c for c in feature_columns if c not in header]
    if missing:
        raise DataError(f"{path}: missing feature columns {missing}")
    cols = [header.index(c) for c in feature_columns]
    lab_col = header.index(label_column)
    X = np.empty((len(body), len(cols)))
    raw_labels = []
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
        for j, c in enumerate(cols):
            try:
                X[i - 2, j] = float(row[c])
            except ValueError:
                raise DataError(
                    f"{path}:{i}: column {header[c]!r} is not numeric: {row[c]!r}"
                ) from None
        raw_labels.append(row[lab_col].strip())
    y, names = _parse_labels(raw_labels)
    return Dataset(name or path.stem, X, y, len(names), names, {"source": str(path)})


def balance(dataset, per_class, seed=0):
    """Keep ``per_class`` uniformly sampled rows of every class.

    Surviving rows keep their original relative order.
    """
    per_class = int(per_class)
    rng = np.random.default_rng(seed)
    keep = []
    for c in range(dataset.n_classes):
        idx = np.flatnonzero(dataset.labels == c)
        if idx.size < per_class:
            raise DataError(
                f"class {dataset.label_names[c]!r} has {idx.size} rows, need {per_class}"
            )
        keep.append(rng.choice(idx, per_class, replace=False))
    out = dataset.subset(np.sort(np.concatenate(keep)))
    out.metadata["balanced_per_class"] = per_class
    return out


@dataclass
class SplitPlan:
    kind: str
    folds: list
    k: int | None = None
    seed: int | None = None

    def __len__(self):
        return len(self.folds)

    def to_dict(self):
        return {"kind": self.kind, "k": self.k, "seed": self.seed, "n_folds": len(self.folds)}


def make_splits(dataset, kind="kfold", k=5, seed=0):
    """Cross-validation folds as ``(train_index, test_index)`` pairs.

    ``kind="loo"`` holds out one row per fold; ``kind="kfold"`` builds ``k``
    stratified, shuffled folds.
    """
    M = dataset.n_samples
    if kind == "loo":
        all_idx = np.arange(M)
        folds = [(np.delete(all_idx, i), np.array([i])) for i in range(M)]
        return SplitPlan("loo", folds)
    if kind != "kfold":
        raise ValueError(f"unknown split kind {kind!r}")
    k = int(k)
    if k < 2:
        raise ValueError(f"k-fold needs k >= 2, got {k}")
    if k > M:
        raise ValueError(f"k = {k} exceeds the {M} available rows")
    skf = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    folds = list(skf.split(dataset.features, dataset.labels))
    return SplitPlan("kfold", folds, k=k, seed=seed)
