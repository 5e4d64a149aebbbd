"""Gini-index sparseness of attribution magnitudes and regime comparisons."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "gini",
    "gini_of_attribution",
    "GiniReport",
    "make_gini_report",
    "SparsenessComparison",
    "compare_regimes",
]


def gini(v) -> float:
    """Sparseness of a non-negative vector, in [0, 1].

    Sorted ascending, G(v) = 1 - 2 * sum_k (v_(k)/||v||_1) * ((d - k + 0.5)/d),
    computed here in the algebraically equal rank form
    sum_k v_(k) * (2k - d - 1) / (d * ||v||_1) with exact summation, so an
    all-equal vector scores exactly 0. A zero vector scores 0 with a warning.
    Raises on negative entries.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("gini needs a non-empty 1-d vector")
    if np.any(v < 0):
        raise ValueError("gini is defined for non-negative values only")
    total = math.fsum(v.tolist())
    if total == 0.0:
        warnings.warn("gini of an all-zero vector is degenerate; returning 0", stacklevel=2)
        return 0.0
    d = v.size
    ordered = np.sort(v, kind="stable")
    ranks = 2.0 * np.arange(1, d + 1) - d - 1
    num = math.fsum((ordered * ranks).tolist())
    return max(num / (d * total), 0.0)


def gini_of_attribution(attr) -> float:
    """Gini of the absolute attribution values (0, with a warning, if all zero)."""
    return gini(np.abs(attr.values))


@dataclass
class GiniReport:
    """Per-example attribution Gini values for one trained regime."""

    regime_tag: str
    per_example: np.ndarray
    split_key: str = ""
    mean: float = field(init=False)

    def __post_init__(self):
        self.per_example = np.asarray(self.per_example, dtype=float)
        if self.per_example.ndim != 1 or self.per_example.size == 0:
            raise ValueError("per_example must be a non-empty vector")
        if np.any(self.per_example < 0) or np.any(self.per_example > 1):
            raise ValueError("gini values must lie in [0, 1]")
        self.mean = float(self.per_example.mean())


def make_gini_report(attribs, regime_tag: str, split_key: str = "") -> GiniReport:
    values = np.array([gini_of_attribution(a) for a in attribs])
    return GiniReport(regime_tag=regime_tag, per_example=values, split_key=split_key)


@dataclass
class SparsenessComparison:
    """Mean-Gini gaps of the robust regimes over the natural one, the matching
    accuracy drops (percentage points), and per-example gap distributions."""

    natural_mean_gini: float
    gap_adversarial: float | None = None
    gap_l1: float | None = None
    accuracy_drop_adversarial_pct: float | None = None
    accuracy_drop_l1_pct: float | None = None
    per_example_gap_adversarial: np.ndarray | None = None
    per_example_gap_l1: np.ndarray | None = None
    adversarial_tag: str | None = None
    l1_tag: str | None = None


def _check_match(natural: GiniReport, other: GiniReport):
    if other.per_example.shape != natural.per_example.shape:
        raise ValueError(
            f"regime {other.regime_tag!r} evaluated on {other.per_example.size} examples, "
            f"natural on {natural.per_example.size}: splits differ"
        )
    if natural.split_key and other.split_key and natural.split_key != other.split_key:
        raise ValueError(
            f"regime {other.regime_tag!r} split key {other.split_key!r} != {natural.split_key!r}"
        )


def compare_regimes(natural: GiniReport, adversarial: GiniReport | None,
                    l1: GiniReport | None, accuracies: dict) -> SparsenessComparison:
    """Gaps are mean(robust regime Gini) - mean(natural Gini), paired per example.

    accuracies maps regime tags to test accuracy in [0, 1]; drops are reported
    in percentage points relative to the natural model.
    """
    if natural.regime_tag not in accuracies:
        raise ValueError(f"missing accuracy for regime {natural.regime_tag!r}")
    acc_n = accuracies[natural.regime_tag]
    out = SparsenessComparison(natural_mean_gini=natural.mean)
    if adversarial is not None:
        _check_match(natural, adversarial)
        if adversarial.regime_tag not in accuracies:
            raise ValueError(f"missing accuracy for regime {adversarial.regime_tag!r}")
        out.gap_adversarial = adversarial.mean - natural.mean
        out.per_example_gap_adversarial = adversarial.per_example - natural.per_example
        out.accuracy_drop_adversarial_pct = 100.0 * (acc_n - accuracies[adversarial.regime_tag])
        out.adversarial_tag = adversarial.regime_tag
    if l1 is not None:
        _check_match(natural, l1)
        if l1.regime_tag not in accuracies:
            raise ValueError(f"missing accuracy for regime {l1.regime_tag!r}")
        out.gap_l1 = l1.mean - natural.mean
        out.per_example_gap_l1 = l1.per_example - natural.per_example
        out.accuracy_drop_l1_pct = 100.0 * (acc_n - accuracies[l1.regime_tag])
        out.l1_tag = l1.regime_tag
    return out
