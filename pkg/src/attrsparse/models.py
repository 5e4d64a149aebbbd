"""Model families: linear scoring models, small dense MLPs, one-vs-all stacks.

All models expose margin(x) -> raw score(s) so the margin losses apply
uniformly; probability-style output goes through value(x).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._util import fmt_float
from .losses import LossSpec, make_loss, sigmoid

__all__ = [
    "LinearModel",
    "MlpModel",
    "OneVsAllModel",
    "predict",
    "classify",
    "mlp_loss_gradient",
    "init_mlp",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

_FORMAT_VERSION = 1


def _check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")


@dataclass
class LinearModel:
    """Score A(<w, x> + bias) with activation A in {sigmoid, identity}."""

    w: np.ndarray
    activation: str = "sigmoid"
    bias: float | None = None

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.ndim != 1:
            raise ValueError(f"weights must be 1-d, got shape {self.w.shape}")
        _check_finite(self.w, "weights")
        if self.activation not in ("sigmoid", "identity"):
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.bias is not None:
            self.bias = float(self.bias)
            _check_finite(np.asarray(self.bias), "bias")

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    def margin(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"input dimension {x.shape[-1]} != model dimension {self.dim}")
        m = x @ self.w
        if self.bias is not None:
            m = m + self.bias
        return m

    def value(self, x):
        """Model output F(x): activation applied to the margin."""
        m = self.margin(x)
        return sigmoid(m) if self.activation == "sigmoid" else m

    def value_and_input_gradient(self, x):
        """F(x) and dF/dx; batch rows give one gradient row each."""
        x = np.asarray(x, dtype=float)
        m = self.margin(x)
        if self.activation == "sigmoid":
            p = sigmoid(m)
            slope = p * (1.0 - p)
        else:
            p = m
            slope = np.ones_like(np.asarray(m, dtype=float))
        if x.ndim == 1:
            return p, slope * self.w
        return p, np.asarray(slope)[:, None] * self.w[None, :]


_HIDDEN_ACTS = ("softplus", "tanh", "relu")


def _act(kind, t):
    if kind == "softplus":
        return np.logaddexp(0.0, t)
    if kind == "tanh":
        return np.tanh(t)
    return np.maximum(0.0, t)


def _act_deriv(kind, t):
    if kind == "softplus":
        return sigmoid(t)
    if kind == "tanh":
        th = np.tanh(t)
        return 1.0 - th * th
    return np.where(t > 0.0, 1.0, 0.0)


@dataclass
class MlpModel:
    """Dense feed-forward net with a single sigmoid output unit.

    weights[l] has shape (fan_in, fan_out); the last layer has fan_out 1.
    margin(x) is the pre-sigmoid output logit, so the margin losses apply.
    """

    weights: list = field(default_factory=list)
    biases: list = field(default_factory=list)
    hidden_activation: str = "softplus"

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("weights and biases must be non-empty lists of equal length")
        if self.hidden_activation not in _HIDDEN_ACTS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        self.weights = [np.asarray(W, dtype=float) for W in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.ndim != 1 or W.shape[1] != b.shape[0]:
                raise ValueError(f"layer {i}: weight shape {W.shape} and bias shape {b.shape} disagree")
            if i > 0 and self.weights[i - 1].shape[1] != W.shape[0]:
                raise ValueError(f"layer {i}: fan-in {W.shape[0]} != previous fan-out")
            _check_finite(W, f"layer {i} weights")
            _check_finite(b, f"layer {i} biases")
        if self.weights[-1].shape[1] != 1:
            raise ValueError("output layer must have a single unit")

    @property
    def dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def layer_sizes(self):
        return [self.weights[0].shape[0]] + [W.shape[1] for W in self.weights]

    def _forward(self, X):
        """Forward pass caching pre-activations; X must be 2-d (n, d)."""
        pre = []      # pre-activation per hidden layer
        acts = [X]    # layer inputs, starting with the data
        h = X
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            t = h @ W + b
            pre.append(t)
            h = _act(self.hidden_activation, t)
            acts.append(h)
        logit = (h @ self.weights[-1] + self.biases[-1])[:, 0]
        return logit, pre, acts

    def margin(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"input dimension {x.shape[-1]} != model dimension {self.dim}")
        single = x.ndim == 1
        logit, _, _ = self._forward(x[None, :] if single else x)
        return float(logit[0]) if single else logit

    def value(self, x):
        return sigmoid(self.margin(x))

    def backprop(self, X, dlogit):
        """Reverse pass from dLoss/dlogit (n,).

        Returns (weight_grads, bias_grads, input_grads): parameter gradients
        are summed over the batch, input gradients are per example (n, d).
        """
        X = np.asarray(X, dtype=float)
        dlogit = np.asarray(dlogit, dtype=float)
        _, pre, acts = self._forward(X)
        weight_grads = [None] * len(self.weights)
        bias_grads = [None] * len(self.biases)
        delta = dlogit[:, None]  # gradient at the output unit
        weight_grads[-1] = acts[-1].T @ delta
        bias_grads[-1] = delta.sum(axis=0)
        upstream = delta @ self.weights[-1].T
        for l in range(len(self.weights) - 2, -1, -1):
            delta = upstream * _act_deriv(self.hidden_activation, pre[l])
            weight_grads[l] = acts[l].T @ delta
            bias_grads[l] = delta.sum(axis=0)
            upstream = delta @ self.weights[l].T
        return weight_grads, bias_grads, upstream

    def value_and_input_gradient(self, x):
        """F(x) = sigmoid(logit) and dF/dx via one reverse pass."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x[None, :] if single else x
        logit, _, _ = self._forward(X)
        p = sigmoid(logit)
        slope = p * (1.0 - p)
        _, _, dx = self.backprop(X, slope)
        if single:
            return float(p[0]), dx[0]
        return p, dx


@dataclass
class OneVsAllModel:
    """k >= 3 linear heads over a shared input; class = argmax head margin."""

    heads: list

    def __post_init__(self):
        if len(self.heads) < 3:
            raise ValueError("one-vs-all model needs at least 3 heads")
        dims = {h.dim for h in self.heads}
        if len(dims) != 1:
            raise ValueError(f"heads disagree on input dimension: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.heads[0].dim

    @property
    def n_classes(self) -> int:
        return len(self.heads)

    def margins(self, x):
        """Stack of head margins; shape (k,) for one example, (n, k) for a batch."""
        x = np.asarray(x, dtype=float)
        out = np.stack([h.margin(x) for h in self.heads], axis=-1)
        return out


def predict(model, x):
    """Linear/MLP: output value (probability for sigmoid); one-vs-all: class index."""
    if isinstance(model, OneVsAllModel):
        return np.argmax(model.margins(x), axis=-1)
    return model.value(x)


def classify(model, x):
    """Hard labels: +1 where value >= 0.5 else -1; one-vs-all returns class index."""
    if isinstance(model, OneVsAllModel):
        return predict(model, x)
    p = model.value(x)
    return np.where(np.asarray(p) >= 0.5, 1.0, -1.0)


def mlp_loss_gradient(model: MlpModel, x, y, spec: LossSpec | None = None):
    """Gradients of g(-y * logit) w.r.t. all parameters and the input.

    Returns ((weight_grads, bias_grads), input_grad) for one example.
    """
    spec = spec or make_loss("logistic-nll")
    x = np.asarray(x, dtype=float)
    y = float(y)
    X = x[None, :]
    logit, _, _ = model._forward(X)
    dlogit = -y * spec.gprime(-y * logit)
    wg, bg, dx = model.backprop(X, dlogit)
    return (wg, bg), dx[0]


def init_mlp(layer_sizes, rng, hidden_activation="softplus") -> MlpModel:
    """Glorot-uniform initialized MLP; layer_sizes like [d, h1, ..., 1]."""
    if layer_sizes[-1] != 1:
        raise ValueError("output layer size must be 1")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights=weights, biases=biases, hidden_activation=hidden_activation)


# --- serialization: parameters as decimal strings that round-trip bit-exact ---

def _encode(arr):
    arr = np.asarray(arr, dtype=float)
    if arr.ndim == 1:
        return [fmt_float(v) for v in arr]
    return [[fmt_float(v) for v in row] for row in arr]


def _decode(data):
    return np.asarray(data, dtype=float)


def model_to_dict(model) -> dict:
    if isinstance(model, LinearModel):
        return {
            "format_version": _FORMAT_VERSION,
            "kind": "linear",
            "activation": model.activation,
            "dim": model.dim,
            "weights": _encode(model.w),
            "bias": None if model.bias is None else fmt_float(model.bias),
        }
    if isinstance(model, MlpModel):
        return {
            "format_version": _FORMAT_VERSION,
            "kind": "mlp",
            "hidden_activation": model.hidden_activation,
            "layer_sizes": model.layer_sizes,
            "weights": [_encode(W) for W in model.weights],
            "biases": [_encode(b) for b in model.biases],
        }
    if isinstance(model, OneVsAllModel):
        return {
            "format_version": _FORMAT_VERSION,
            "kind": "one-vs-all",
            "heads": [model_to_dict(h) for h in model.heads],
        }
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def model_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "linear":
        bias = data.get("bias")
        return LinearModel(
            w=_decode(data["weights"]),
            activation=data["activation"],
            bias=None if bias is None else float(bias),
        )
    if kind == "mlp":
        return MlpModel(
            weights=[_decode(W) for W in data["weights"]],
            biases=[_decode(b) for b in data["biases"]],
            hidden_activation=data["hidden_activation"],
        )
    if kind == "one-vs-all":
        return OneVsAllModel(heads=[model_from_dict(h) for h in data["heads"]])
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
