"""Small MLP classifiers for downstream evaluation of representations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import (
    MlpModel,
    NumericsError,
    OptimizerState,
    as_matrix,
    backward,
    forward,
    init_mlp,
    make_rng,
    optimizer_step,
    spawn_rng,
)
from ..numerics.rng import SALT_BATCHES


@dataclass
class PredictorConfig:
    hidden: tuple[int, ...] = (128, 128)
    learning_rate: float = 1e-4
    epochs: int = 500
    batch_size: int = 256
    clip_norm: float | None = 5.0
    hidden_activation: str = "relu"
    seed: int = 0


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def train_classifier(features, labels, n_classes: int,
                     config: PredictorConfig | None = None) -> MlpModel:
    """Cross-entropy training: softmax over classes, single logit when binary."""
    cfg = config or PredictorConfig()
    x = as_matrix(features, "features")
    y = np.asarray(labels).ravel().astype(np.int64)
    if y.size != x.shape[0]:
        raise NumericsError(f"row mismatch: {x.shape[0]} features, {y.size} labels")
    if n_classes < 2:
        raise NumericsError("need at least 2 classes")
    if y.min() < 0 or y.max() >= n_classes:
        raise NumericsError(f"labels outside [0, {n_classes})")

    out_dim = 1 if n_classes == 2 else n_classes
    model = init_mlp([x.shape[1], *cfg.hidden, out_dim],
                     activation=cfg.hidden_activation, seed=cfg.seed)
    opt = OptimizerState(kind="adam", learning_rate=cfg.learning_rate,
                         clip_norm=cfg.clip_norm)
    rng = spawn_rng(cfg.seed, SALT_BATCHES)
    batch = min(cfg.batch_size, x.shape[0])
    for _ in range(cfg.epochs):
        idx = rng.choice(x.shape[0], size=batch, replace=False)
        xb, yb = x[idx], y[idx]
        logits, cache = forward(model, xb)
        if n_classes == 2:
            p = 1.0 / (1.0 + np.exp(-logits[:, 0]))
            grad = ((p - yb) / batch)[:, None]
        else:
            p = _softmax(logits)
            p[np.arange(batch), yb] -= 1.0
            grad = p / batch
        grads, _ = backward(model, cache, grad)
        optimizer_step(model, grads, opt)
    return model


def predict_labels(model: MlpModel, features) -> np.ndarray:
    logits, _ = forward(model, as_matrix(features, "features"))
    if model.output_dim == 1:
        return (logits[:, 0] > 0).astype(np.int64)
    return np.argmax(logits, axis=1).astype(np.int64)


def train_eval_predictor(train_features, train_labels, test_features,
                         test_labels, n_classes: int,
                         config: PredictorConfig | None = None
                         ) -> tuple[MlpModel, float]:
    """Train on the training split, return the model and test accuracy."""
    model = train_classifier(train_features, train_labels, n_classes, config)
    preds = predict_labels(model, test_features)
    truth = np.asarray(test_labels).ravel().astype(np.int64)
    if truth.size != preds.size:
        raise NumericsError("test label count does not match features")
    return model, float(np.mean(preds == truth))
