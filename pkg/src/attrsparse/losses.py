"""Margin losses for binary classifiers.

Each catalogued loss is a scalar function g that is non-decreasing, convex and
differentiable almost everywhere; the per-example loss of a linear model on
(x, y) with y in {-1, +1} is g(-y * <w, x>).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["LossSpec", "make_loss", "LOSS_KINDS", "loss", "loss_gradient", "sigmoid"]


def sigmoid(z):
    """Numerically stable logistic function, elementwise."""
    z = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _softplus(z):
    # log(1 + e^z) without overflow for large z
    return np.logaddexp(0.0, z)


def _logistic_g(z):
    return _softplus(z)


def _logistic_gprime(z):
    return sigmoid(z)


def _hinge_g(z):
    return np.maximum(0.0, 1.0 + np.asarray(z, dtype=float))


def _hinge_gprime(z):
    # subgradient: 1 where z > -1, 0 elsewhere (0 at the kink itself)
    z = np.asarray(z, dtype=float)
    return np.where(z > -1.0, 1.0, 0.0)


def _softplus_hinge_g(z):
    return _softplus(1.0 + np.asarray(z, dtype=float))


def _softplus_hinge_gprime(z):
    return sigmoid(1.0 + np.asarray(z, dtype=float))


@dataclass(frozen=True)
class LossSpec:
    """A margin loss: non-decreasing convex g with derivative gprime."""

    kind: str
    g: Callable = field(repr=False)
    gprime: Callable = field(repr=False)


_CATALOG = {
    "logistic-nll": LossSpec("logistic-nll", _logistic_g, _logistic_gprime),
    "hinge": LossSpec("hinge", _hinge_g, _hinge_gprime),
    "softplus-hinge": LossSpec("softplus-hinge", _softplus_hinge_g, _softplus_hinge_gprime),
}
_ALIASES = {"logistic": "logistic-nll"}

LOSS_KINDS = tuple(_CATALOG)


def make_loss(kind: str) -> LossSpec:
    """Look up a catalogued loss by name ("logistic-nll", "hinge", "softplus-hinge")."""
    key = _ALIASES.get(kind, kind)
    try:
        return _CATALOG[key]
    except KeyError:
        raise ValueError(f"unknown loss kind {kind!r}; choose one of {sorted(_CATALOG)}") from None


def loss(spec: LossSpec, model, x, y):
    """Natural loss g(-y * margin) of a linear model on one example (or a batch)."""
    margin = model.margin(x)
    return spec.g(-np.asarray(y, dtype=float) * margin)


def loss_gradient(spec: LossSpec, model, x, y):
    """Gradient of the natural loss w.r.t. the weights: -y * g'(-y<w,x>) * x.

    Accepts a single example (d,) or a batch (n, d); the batch form returns
    per-example gradient rows (n, d).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    margin = model.margin(x)
    coef = -y * spec.gprime(-y * margin)
    if x.ndim == 1:
        return coef * x
    return coef[:, None] * x
