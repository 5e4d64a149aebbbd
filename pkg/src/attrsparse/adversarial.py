"""Worst-case l-infinity perturbations: exact closed form for linear margin
models, projected gradient ascent for MLPs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .losses import LossSpec, make_loss
from .models import LinearModel, MlpModel, OneVsAllModel

__all__ = [
    "PerturbationBudget",
    "PgdConfig",
    "default_pgd_config",
    "closed_form_perturbation",
    "adversarial_loss",
    "adversarial_loss_gradient",
    "pgd_perturbation",
    "pgd_perturb_batch",
    "one_vs_all_perturbation",
]


@dataclass(frozen=True)
class PerturbationBudget:
    """Max per-coordinate perturbation magnitude (same units as the features)."""

    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class PgdConfig:
    steps: int
    step_size: float = 0.01
    random_start: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")


def default_pgd_config(epsilon: float, seed: int = 0) -> PgdConfig:
    """Step count floor(eps*100) + 10 at step size 0.01, with random start."""
    return PgdConfig(steps=int(math.floor(epsilon * 100)) + 10, step_size=0.01,
                     random_start=True, seed=seed)


def closed_form_perturbation(model: LinearModel, y, budget: PerturbationBudget):
    """Loss-maximizing perturbation -y * sign(w) * eps (sign(0) = 0).

    Independent of x: the worst case pushes every coordinate against the
    weight's sign. Coordinates with w_i = 0 do not affect the loss and stay 0.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        return -float(y) * np.sign(model.w) * budget.epsilon
    return -y[:, None] * np.sign(model.w)[None, :] * budget.epsilon


def adversarial_loss(spec: LossSpec, model: LinearModel, x, y, budget: PerturbationBudget):
    """Worst-case loss over the eps-box: g(eps*||w||_1 - y*<w,x>).

    Accepts one example or a batch; equals the natural loss at
    x + closed_form_perturbation exactly.
    """
    margin = model.margin(x)
    y = np.asarray(y, dtype=float)
    return spec.g(budget.epsilon * np.abs(model.w).sum() - y * margin)


def adversarial_loss_gradient(spec: LossSpec, model: LinearModel, x, y,
                              budget: PerturbationBudget):
    """Weight gradient of the worst-case loss:
    -g'(eps*||w||_1 - y<w,x>) * (y*x - sign(w)*eps), elementwise.

    Batch input (n, d) returns per-example gradient rows.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    margin = model.margin(x)
    slope = spec.gprime(budget.epsilon * np.abs(model.w).sum() - y * margin)
    shift = np.sign(model.w) * budget.epsilon
    if x.ndim == 1:
        return -slope * (y * x - shift)
    return -slope[:, None] * (y[:, None] * x - shift[None, :])


def _model_loss_and_input_grad(spec, model, X, y):
    """Training loss g(-y*margin) per example and its gradient in the input."""
    y = np.asarray(y, dtype=float)
    if isinstance(model, MlpModel):
        logit, _, _ = model._forward(X)
        z = -y * logit
        dlogit = -y * spec.gprime(z)
        _, _, dx = model.backprop(X, dlogit)
        return spec.g(z), dx
    margin = X @ model.w + (model.bias or 0.0)
    z = -y * margin
    dx = (-y * spec.gprime(z))[:, None] * model.w[None, :]
    return spec.g(z), dx


def pgd_perturb_batch(model, X, y, budget: PerturbationBudget, cfg: PgdConfig,
                      spec: LossSpec | None = None, rng=None, clamp01=False):
    """Projected signed-gradient ascent on a batch; rows perturbed independently.

    Deterministic given cfg.seed (or a caller-supplied generator). If the final
    iterate somehow scores below the start (possible on non-concave losses),
    the start is returned, so loss(x + delta) >= loss(x + delta0) always holds.
    """
    spec = spec or make_loss("logistic-nll")
    X = np.asarray(X, dtype=float)
    eps = budget.epsilon
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    if cfg.random_start:
        delta = rng.uniform(-eps, eps, size=X.shape)
    else:
        delta = np.zeros_like(X)
    start = delta.copy()
    start_loss, _ = _model_loss_and_input_grad(spec, model, X + delta, y)
    for _ in range(cfg.steps):
        _, dx = _model_loss_and_input_grad(spec, model, X + delta, y)
        delta = np.clip(delta + cfg.step_size * np.sign(dx), -eps, eps)
        if clamp01:
            delta = np.clip(delta, -X, 1.0 - X)
    final_loss, _ = _model_loss_and_input_grad(spec, model, X + delta, y)
    worse = final_loss < start_loss
    if np.any(worse):
        delta[worse] = start[worse]
    return delta


def pgd_perturbation(model, x, y, budget: PerturbationBudget, cfg: PgdConfig,
                     spec: LossSpec | None = None, rng=None, clamp01=False):
    """Single-example wrapper around pgd_perturb_batch."""
    if budget.epsilon <= 0:
        raise ValueError("pgd needs epsilon > 0")
    x = np.asarray(x, dtype=float)
    delta = pgd_perturb_batch(model, x[None, :], [y], budget, cfg,
                              spec=spec, rng=rng, clamp01=clamp01)
    return delta[0]


def one_vs_all_perturbation(model: OneVsAllModel, y_class: int,
                            budget: PerturbationBudget):
    """Per-head closed forms: head i sees label +1 iff i == y_class."""
    if not 0 <= y_class < model.n_classes:
        raise ValueError(f"class {y_class} out of range for {model.n_classes} heads")
    out = []
    for i, head in enumerate(model.heads):
        y_i = 1.0 if i == y_class else -1.0
        out.append(closed_form_perturbation(head, y_i, budget))
    return out
