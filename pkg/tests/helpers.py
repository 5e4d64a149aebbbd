"""Shared test utilities: surrogate dataset generators and file loaders.

The surrogate generators produce data with the same shape and texture as the
two real tabular benchmarks (one all-categorical, one all-numeric) so the
full pipeline can be exercised hermetically. They make no claim of matching
the published numbers; quantitative reproduction tests run only against the
real files (see data/README.md).
"""
from __future__ import annotations

import csv
import os

import numpy as np

from attrsparse.data import Dataset, load_csv

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")
MUSHROOM_PATH = os.path.abspath(os.path.join(DATA_DIR, "mushroom.csv"))
SPAMBASE_PATH = os.path.abspath(os.path.join(DATA_DIR, "spambase.csv"))


def make_categorical_csv(path, n=2000, seed=0) -> str:
    """All-categorical binary task: a few strongly informative columns, a few
    weak ones, several pure-noise ones; single-letter categories."""
    rng = np.random.default_rng(seed)
    y = rng.uniform(size=n) < 0.48
    rows = []
    strong_cats = np.array(list("abcdef"))
    noise_cats = np.array(list("xyzw"))
    for i in range(n):
        label = "p" if y[i] else "e"
        row = [label]
        # two near-deterministic columns (like a dominant categorical marker)
        for flip_p in (0.02, 0.05):
            flip = rng.uniform() < flip_p
            side = y[i] ^ flip
            row.append(strong_cats[rng.integers(0, 3) + (3 if side else 0)])
        # three weakly informative columns
        for shift in (0.25, 0.2, 0.15):
            p = 0.5 + (shift if y[i] else -shift)
            row.append("t" if rng.uniform() < p else "f")
        # five noise columns
        for _ in range(5):
            row.append(noise_cats[rng.integers(0, len(noise_cats))])
        rows.append(row)
    header = ["class"] + [f"c{j}" for j in range(1, 11)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return str(path)


def make_numeric_csv(path, n=1500, n_features=57, seed=0) -> str:
    """All-numeric binary task: skewed non-negative features, a handful of
    informative columns, the rest noise."""
    rng = np.random.default_rng(seed)
    y = (rng.uniform(size=n) < 0.4).astype(float)
    X = rng.exponential(scale=0.5, size=(n, n_features))
    informative = rng.choice(n_features, size=10, replace=False)
    for k, j in enumerate(informative):
        lift = 0.8 + 0.2 * k
        X[:, j] += lift * y * rng.exponential(scale=1.0, size=n)
    header = [f"f{j}" for j in range(n_features)] + ["label"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(n):
            writer.writerow([f"{v:.6f}" for v in X[i]] + [int(y[i])])
    return str(path)


def categorical_schema(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    return [(name, "categorical") for name in header if name != "class"]


def numeric_schema(path, label="label") -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    return [(name, "numeric") for name in header if name != label]


def _has_header(first_row, known_labels) -> bool:
    return not any(cell in known_labels for cell in first_row)


def load_mushroom_file(path, tmp_dir) -> Dataset:
    """Accepts the raw benchmark file (headerless, label first, 22 categorical
    attributes) or the same data with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty")
    if _has_header(rows[0], {"e", "p"}):
        header, body = rows[0], rows[1:]
        label_col = header[0]
    else:
        header = ["class"] + [f"a{j}" for j in range(1, len(rows[0]))]
        body, label_col = rows, "class"
    staged = os.path.join(tmp_dir, "mushroom_headed.csv")
    with open(staged, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
    schema = [(name, "categorical") for name in header if name != label_col]
    return load_csv(staged, schema, label_col, split_seed=0)


def load_spambase_file(path, tmp_dir) -> Dataset:
    """Accepts the raw benchmark file (headerless, 57 numeric columns, 0/1
    label last) or the same data with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty")
    def _numeric_row(row):
        try:
            [float(v) for v in row]
            return True
        except ValueError:
            return False
    if _numeric_row(rows[0]):
        header = [f"f{j}" for j in range(len(rows[0]) - 1)] + ["label"]
        body = rows
    else:
        header, body = rows[0], rows[1:]
    label_col = header[-1]
    staged = os.path.join(tmp_dir, "spambase_headed.csv")
    with open(staged, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
    schema = [(name, "numeric") for name in header if name != label_col]
    return load_csv(staged, schema, label_col, split_seed=0)
