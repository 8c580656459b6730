"""Feedforward networks with manual reverse-mode gradients.

Dense float64 matrices carry every batch and parameter. Hidden layers use
relu or tanh; the output layer is always linear. `backward` returns exact
gradients for the scalar loss whose output-gradient is supplied, including
the gradient with respect to the network input (needed when a downstream
network's loss is pushed back into an upstream generator).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import SALT_MODEL_INIT, spawn_rng

HIDDEN_ACTIVATIONS = ("relu", "tanh")


class NumericsError(ValueError):
    """Shape violation, non-finite value, or stale cache."""


def as_matrix(x, name: str = "input") -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting non-finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise NumericsError(f"{name}: expected 2-D matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise NumericsError(f"{name}: contains non-finite entries")
    return arr


def check_finite(arr: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NumericsError(f"{name}: non-finite values encountered")
    return arr


@dataclass
class MlpModel:
    """Weights/biases for a fully-connected net; weights[i] is dims[i] x dims[i+1]."""

    layer_dims: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "relu"
    version: int = 0  # bumped on every parameter update; guards stale caches

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def parameters(self) -> list[np.ndarray]:
        """Weights then biases, in layer order."""
        return list(self.weights) + list(self.biases)


@dataclass
class GradientSet:
    """Per-parameter gradients mirroring an MlpModel's shapes."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def parameters(self) -> list[np.ndarray]:
        return list(self.weights) + list(self.biases)

    def add_(self, other: "GradientSet") -> "GradientSet":
        for a, b in zip(self.weights, other.weights):
            a += b
        for a, b in zip(self.biases, other.biases):
            a += b
        return self

    def scale_(self, factor: float) -> "GradientSet":
        for g in self.parameters():
            g *= factor
        return self

    @staticmethod
    def zeros_like(model: MlpModel) -> "GradientSet":
        return GradientSet(
            weights=[np.zeros_like(w) for w in model.weights],
            biases=[np.zeros_like(b) for b in model.biases],
        )


@dataclass
class ForwardCache:
    """Activation record from one forward pass; valid for one model version."""

    inputs: list[np.ndarray] = field(default_factory=list)  # input to each layer
    preacts: list[np.ndarray] = field(default_factory=list)  # pre-activation of each layer
    model_version: int = 0


def init_mlp(dims: list[int], activation: str = "relu", seed: int = 0) -> MlpModel:
    """Fan-in-scaled uniform weights (Xavier), zero biases, deterministic per seed."""
    if len(dims) < 2:
        raise NumericsError(f"init_mlp: need input and output dims, got {dims}")
    if any(int(d) < 1 for d in dims):
        raise NumericsError(f"init_mlp: all dims must be >= 1, got {dims}")
    if activation not in HIDDEN_ACTIVATIONS:
        raise NumericsError(f"init_mlp: unknown activation {activation!r}")
    dims = [int(d) for d in dims]
    rng = spawn_rng(seed, SALT_MODEL_INIT)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_dims=dims, weights=weights, biases=biases,
                    hidden_activation=activation)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _activate_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    t = np.tanh(z)
    return 1.0 - t * t


def forward(model: MlpModel, x) -> tuple[np.ndarray, ForwardCache]:
    """Batch forward pass; returns (output, cache sufficient for backward)."""
    a = as_matrix(x, "forward input")
    if a.shape[1] != model.input_dim:
        raise NumericsError(
            f"forward: input has {a.shape[1]} cols, model expects {model.input_dim}")
    cache = ForwardCache(model_version=model.version)
    last = model.n_layers - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        cache.inputs.append(a)
        z = a @ w + b
        cache.preacts.append(z)
        a = _activate(z, model.hidden_activation) if i < last else z
    return check_finite(a, "forward output"), cache


def backward(model: MlpModel, cache: ForwardCache,
             output_grad: np.ndarray) -> tuple[GradientSet, np.ndarray]:
    """Reverse-mode gradients for the loss whose d(loss)/d(output) is given.

    Returns (parameter gradients, gradient with respect to the input batch).
    """
    if cache.model_version != model.version:
        raise NumericsError("backward: stale cache (model updated since forward)")
    g = np.asarray(output_grad, dtype=np.float64)
    if g.ndim == 1:
        g = g[:, None]
    out_shape = (cache.inputs[-1].shape[0], model.output_dim)
    if g.shape != out_shape:
        raise NumericsError(
            f"backward: output_grad shape {g.shape} != forward output shape {out_shape}")
    w_grads: list[np.ndarray] = [None] * model.n_layers  # type: ignore[list-item]
    b_grads: list[np.ndarray] = [None] * model.n_layers  # type: ignore[list-item]
    last = model.n_layers - 1
    for i in range(last, -1, -1):
        if i < last:
            g = g * _activate_grad(cache.preacts[i], model.hidden_activation)
        w_grads[i] = cache.inputs[i].T @ g
        b_grads[i] = g.sum(axis=0)
        g = g @ model.weights[i].T
    return GradientSet(weights=w_grads, biases=b_grads), g
