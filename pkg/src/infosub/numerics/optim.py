"""SGD and Adam with optional global-norm gradient clipping.

Parameters are updated in place under a single-writer discipline; every
step bumps the model version so stale forward caches are detectable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import GradientSet, MlpModel, NumericsError

OPTIMIZER_KINDS = ("sgd", "adam")


@dataclass
class OptimizerState:
    kind: str = "adam"
    learning_rate: float = 1e-4
    clip_norm: float | None = None
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    first_moment: GradientSet | None = field(default=None, repr=False)
    second_moment: GradientSet | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in OPTIMIZER_KINDS:
            raise NumericsError(f"unknown optimizer kind {self.kind!r}")
        if self.learning_rate <= 0:
            raise NumericsError("learning_rate must be positive")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise NumericsError("clip_norm must be positive when set")


def global_norm(grads: GradientSet) -> float:
    total = 0.0
    for g in grads.parameters():
        total += float(np.sum(g * g))
    return float(np.sqrt(total))


def clip_by_global_norm(grads: GradientSet, clip_norm: float) -> GradientSet:
    """Rescale so the global norm is at most clip_norm; direction preserved."""
    norm = global_norm(grads)
    if norm > clip_norm:
        grads.scale_(clip_norm / norm)
    return grads


def optimizer_step(model: MlpModel, grads: GradientSet, state: OptimizerState) -> None:
    """One in-place descent step; clips first when state.clip_norm is set."""
    for g, p in zip(grads.parameters(), model.parameters()):
        if g.shape != p.shape:
            raise NumericsError(
                f"optimizer_step: gradient shape {g.shape} != parameter shape {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericsError("optimizer_step: non-finite gradients")
    if state.clip_norm is not None:
        clip_by_global_norm(grads, state.clip_norm)
    lr = state.learning_rate
    state.step_count += 1
    if state.kind == "sgd":
        for p, g in zip(model.parameters(), grads.parameters()):
            p -= lr * g
    else:
        if state.first_moment is None:
            state.first_moment = GradientSet.zeros_like(model)
            state.second_moment = GradientSet.zeros_like(model)
        t = state.step_count
        bc1 = 1.0 - state.beta1 ** t
        bc2 = 1.0 - state.beta2 ** t
        params = model.parameters()
        ms = state.first_moment.parameters()
        vs = state.second_moment.parameters()
        for p, g, m, v in zip(params, grads.parameters(), ms, vs):
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * g * g
            p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    model.version += 1
