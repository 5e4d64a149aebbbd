"""Dataset ingestion, one-hot encoding, class-midpoint feature translation,
and synthetic generators with known per-feature class association.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from ._util import fmt_float

__all__ = [
    "FeatureGroup",
    "Dataset",
    "FeatureStrengths",
    "SyntheticSpec",
    "load_csv",
    "translate_features",
    "generate_synthetic",
    "blob_image_spec",
    "decode_row",
    "save_dataset",
    "load_dataset",
]

TRAIN_FRACTION = 0.7
_SIDECAR_VERSION = 1


@dataclass(frozen=True)
class FeatureGroup:
    """One original column's footprint in the encoded matrix.

    Categorical columns own the half-open span [start, stop) of one-hot
    positions (one per category, in first-seen training order); numeric
    columns own a single position.
    """

    name: str
    kind: str  # "categorical" | "numeric"
    start: int
    stop: int
    categories: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("categorical", "numeric"):
            raise ValueError(f"unknown column kind {self.kind!r}")
        if self.kind == "numeric" and self.stop - self.start != 1:
            raise ValueError("numeric column must span exactly one position")
        if self.kind == "categorical":
            if self.categories is None or len(self.categories) != self.stop - self.start:
                raise ValueError(f"column {self.name!r}: category list does not match span")


@dataclass
class Dataset:
    """Encoded feature matrix with labels in {-1,+1} (or class indices), the
    encoding metadata, and a seeded 70/30 train/test split."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: list
    encoding_map: tuple
    split_seed: int = 0
    label_map: dict | None = None
    translated: bool = False

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        n, d = self.features.shape if self.features.ndim == 2 else (0, 0)
        if self.features.ndim != 2 or n < 1 or d < 1:
            raise ValueError("features must be a non-empty 2-d matrix")
        if self.labels.shape != (n,):
            raise ValueError(f"labels shape {self.labels.shape} does not match {n} examples")
        if len(self.feature_names) != d:
            raise ValueError("feature_names length does not match feature count")
        self._validate_labels()
        self._validate_groups()
        perm = np.random.default_rng(self.split_seed).permutation(n)
        n_train = int(round(TRAIN_FRACTION * n))
        self.train_indices = np.sort(perm[:n_train])
        self.test_indices = np.sort(perm[n_train:])

    def _validate_labels(self):
        uniq = np.unique(self.labels)
        if set(uniq.tolist()) <= {-1.0, 1.0}:
            self.binary = True
            return
        if np.all(uniq == np.round(uniq)) and uniq.min() >= 0:
            self.binary = False
            return
        raise ValueError(f"labels must be -1/+1 or class indices, got values {uniq[:8]}")

    def _validate_groups(self):
        covered = np.zeros(self.dim, dtype=bool)
        for g in self.encoding_map:
            if g.start < 0 or g.stop > self.dim or g.start >= g.stop:
                raise ValueError(f"column {g.name!r}: span [{g.start},{g.stop}) out of bounds")
            if covered[g.start:g.stop].any():
                raise ValueError(f"column {g.name!r}: span overlaps another column")
            covered[g.start:g.stop] = True
        if not covered.all():
            raise ValueError("encoding map does not cover every feature position")
        if not self.translated:
            for g in self.encoding_map:
                if g.kind != "categorical":
                    continue
                block = self.features[:, g.start:g.stop]
                ok = np.all(np.isin(block, (0.0, 1.0))) and np.all(block.sum(axis=1) == 1.0)
                if not ok:
                    raise ValueError(f"column {g.name!r}: one-hot block must have exactly one 1 per row")

    @property
    def n_examples(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def split(self, which: str) -> np.ndarray:
        if which == "train":
            return self.train_indices
        if which == "test":
            return self.test_indices
        raise ValueError(f"unknown split {which!r}; use 'train' or 'test'")


@dataclass(frozen=True)
class FeatureStrengths:
    """Per-feature directed class association: E(y * x_i) after translation."""

    values: np.ndarray
    source: str = "estimated"

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("strengths must be finite")


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian generator: label y = +1 w.p. class_balance, x_i = a_i*y + noise."""

    strengths: tuple
    noise_sd: tuple
    class_balance: float = 0.5
    seed: int = 0

    def __post_init__(self):
        a = np.asarray(self.strengths, dtype=float)
        sd = np.broadcast_to(np.asarray(self.noise_sd, dtype=float), a.shape).copy()
        if a.ndim != 1 or a.size < 1:
            raise ValueError("strengths must be a non-empty vector")
        if not np.all(sd > 0):
            raise ValueError("noise_sd must be positive elementwise")
        if not 0.0 < self.class_balance < 1.0:
            raise ValueError("class_balance must be strictly between 0 and 1")
        object.__setattr__(self, "strengths", tuple(a.tolist()))
        object.__setattr__(self, "noise_sd", tuple(sd.tolist()))

    @property
    def dim(self) -> int:
        return len(self.strengths)


def load_csv(path, schema, label_column, *, delimiter=",", split_seed=0,
             positive_label=None) -> Dataset:
    """Read a headed CSV into an encoded Dataset.

    schema: iterable of (column_name, kind) with kind "categorical" or
    "numeric", covering every non-label column. Categories are fitted on the
    training split only (first-seen order); a test-split category unseen in
    training is an error. Binary labels map to {-1,+1} (sorted raw values, or
    positive_label forced to +1); more than two distinct values become class
    indices 0..k-1 in sorted order.
    """
    kinds = {}
    order = []
    for name, kind in schema:
        if kind not in ("categorical", "numeric"):
            raise ValueError(f"column {name!r}: unknown kind {kind!r}")
        if name == label_column:
            continue
        kinds[name] = kind
        order.append(name)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header row required") from None
        rows = [row for row in reader if row]

    if label_column not in header:
        raise ValueError(f"label column {label_column!r} not in header {header}")
    missing = [c for c in header if c != label_column and c not in kinds]
    if missing:
        raise ValueError(f"schema does not name columns: {missing}")
    col_idx = {name: header.index(name) for name in order}
    label_idx = header.index(label_column)
    n = len(rows)
    if n < 1:
        raise ValueError(f"{path}: no data rows")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ValueError(f"row {i}: expected {len(header)} fields, got {len(row)}")

    # split before fitting any statistic; categories come from train rows only
    perm = np.random.default_rng(split_seed).permutation(n)
    train_rows = np.zeros(n, dtype=bool)
    train_rows[perm[: int(round(TRAIN_FRACTION * n))]] = True

    categories = {}
    for name in order:
        if kinds[name] != "categorical":
            continue
        seen = []
        have = set()
        j = col_idx[name]
        for i in range(n):
            if not train_rows[i]:
                continue
            v = rows[i][j]
            if v not in have:
                have.add(v)
                seen.append(v)
        categories[name] = seen

    groups = []
    names = []
    pos = 0
    for name in order:
        if kinds[name] == "categorical":
            cats = categories[name]
            groups.append(FeatureGroup(name, "categorical", pos, pos + len(cats), tuple(cats)))
            names.extend(f"{name}={c}" for c in cats)
            pos += len(cats)
        else:
            groups.append(FeatureGroup(name, "numeric", pos, pos + 1))
            names.append(name)
            pos += 1

    X = np.zeros((n, pos))
    for g in groups:
        j = col_idx[g.name]
        if g.kind == "categorical":
            lookup = {c: k for k, c in enumerate(g.categories)}
            for i in range(n):
                v = rows[i][j]
                if v not in lookup:
                    raise ValueError(
                        f"row {i}, column {g.name!r}: category {v!r} not seen in training split"
                    )
                X[i, g.start + lookup[v]] = 1.0
        else:
            for i in range(n):
                v = rows[i][j]
                try:
                    X[i, g.start] = float(v)
                except ValueError:
                    raise ValueError(
                        f"row {i}, column {g.name!r}: non-numeric value {v!r}"
                    ) from None

    raw_labels = [row[label_idx] for row in rows]
    distinct = sorted(set(raw_labels))
    if len(distinct) < 2:
        raise ValueError(f"label column has a single value {distinct[0]!r}")
    if len(distinct) == 2:
        if positive_label is not None:
            if positive_label not in distinct:
                raise ValueError(f"positive label {positive_label!r} not among {distinct}")
            neg = distinct[0] if distinct[1] == positive_label else distinct[1]
            label_map = {neg: -1, positive_label: 1}
        else:
            label_map = {distinct[0]: -1, distinct[1]: 1}
    else:
        label_map = {v: k for k, v in enumerate(distinct)}
    y = np.array([label_map[v] for v in raw_labels], dtype=float)

    return Dataset(
        features=X,
        labels=y,
        feature_names=names,
        encoding_map=tuple(groups),
        split_seed=split_seed,
        label_map=label_map,
    )


def decode_row(ds: Dataset, row) -> dict:
    """Recover original column values from one encoded row."""
    row = np.asarray(row, dtype=float)
    out = {}
    for g in ds.encoding_map:
        if g.kind == "numeric":
            out[g.name] = float(row[g.start])
        else:
            block = row[g.start:g.stop]
            hot = np.flatnonzero(block == 1.0)
            if hot.size != 1:
                raise ValueError(f"column {g.name!r}: block is not one-hot")
            out[g.name] = g.categories[hot[0]]
    return out


def translate_features(ds: Dataset):
    """Shift every feature by the midpoint of its two class-conditional means.

    Means are estimated on the training split only. Returns the shifted
    dataset and the estimated directed strengths
    (mean(x | y=+1) - mean(x | y=-1)) / 2.
    """
    if not ds.binary:
        raise ValueError("translation requires binary labels")
    tr = ds.train_indices
    y = ds.labels[tr]
    pos = ds.features[tr][y == 1.0]
    neg = ds.features[tr][y == -1.0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("both classes must be present in the training split")
    mu_pos = pos.mean(axis=0)
    mu_neg = neg.mean(axis=0)
    shift = 0.5 * (mu_pos + mu_neg)
    strengths = 0.5 * (mu_pos - mu_neg)
    shifted = Dataset(
        features=ds.features - shift,
        labels=ds.labels.copy(),
        feature_names=list(ds.feature_names),
        encoding_map=ds.encoding_map,
        split_seed=ds.split_seed,
        label_map=ds.label_map,
        translated=True,
    )
    return shifted, FeatureStrengths(values=strengths, source="estimated")


def generate_synthetic(spec: SyntheticSpec, n: int) -> Dataset:
    """Draw n examples: y by class_balance, x_i = a_i*y + Gaussian(0, sd_i)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(spec.seed)
    a = np.asarray(spec.strengths)
    sd = np.asarray(spec.noise_sd)
    y = np.where(rng.uniform(size=n) < spec.class_balance, 1.0, -1.0)
    X = a * y[:, None] + rng.normal(0.0, 1.0, size=(n, a.size)) * sd
    names = [f"f{i}" for i in range(a.size)]
    groups = tuple(FeatureGroup(nm, "numeric", i, i + 1) for i, nm in enumerate(names))
    return Dataset(
        features=X,
        labels=y,
        feature_names=names,
        encoding_map=groups,
        split_seed=spec.seed,
        translated=True,
    )


def blob_image_spec(height=8, width=8, *, strong_amplitude=1.0, weak_amplitude=0.05,
                    blob_sigma=1.3, noise_sd=0.5, class_balance=0.5, seed=0) -> SyntheticSpec:
    """Synthetic image task: the class mean is a centered bright/dark blob.

    Pixels near the image center carry a strong class signal, the rest a weak
    one, so adversarial training has something to prune.
    """
    rr, cc = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    cr, cw = (height - 1) / 2.0, (width - 1) / 2.0
    bump = np.exp(-((rr - cr) ** 2 + (cc - cw) ** 2) / (2.0 * blob_sigma**2))
    strengths = weak_amplitude + (strong_amplitude - weak_amplitude) * bump
    return SyntheticSpec(
        strengths=tuple(strengths.ravel().tolist()),
        noise_sd=(noise_sd,) * (height * width),
        class_balance=class_balance,
        seed=seed,
    )


def save_dataset(ds: Dataset, path):
    """Persist to the JSON sidecar (values as round-trip decimal strings)."""
    doc = {
        "format_version": _SIDECAR_VERSION,
        "features": [[fmt_float(v) for v in row] for row in ds.features],
        "labels": [fmt_float(v) for v in ds.labels],
        "feature_names": list(ds.feature_names),
        "encoding_map": [
            {
                "name": g.name,
                "kind": g.kind,
                "start": g.start,
                "stop": g.stop,
                "categories": list(g.categories) if g.categories is not None else None,
            }
            for g in ds.encoding_map
        ],
        "split_seed": ds.split_seed,
        "label_map": ds.label_map,
        "translated": ds.translated,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    version = doc.get("format_version")
    if version != _SIDECAR_VERSION:
        raise ValueError(f"unsupported dataset sidecar version {version!r}")
    groups = tuple(
        FeatureGroup(
            g["name"], g["kind"], g["start"], g["stop"],
            tuple(g["categories"]) if g["categories"] is not None else None,
        )
        for g in doc["encoding_map"]
    )
    return Dataset(
        features=np.asarray(doc["features"], dtype=float),
        labels=np.asarray(doc["labels"], dtype=float),
        feature_names=list(doc["feature_names"]),
        encoding_map=groups,
        split_seed=doc["split_seed"],
        label_map=doc["label_map"],
        translated=doc["translated"],
    )
