"""Deterministic dense-matrix / feedforward-network engine."""

from .checkpoint import load_mlp, save_mlp
from .mlp import (
    ForwardCache,
    GradientSet,
    MlpModel,
    NumericsError,
    as_matrix,
    backward,
    check_finite,
    forward,
    init_mlp,
)
from .optim import OptimizerState, clip_by_global_norm, global_norm, optimizer_step
from .rng import make_rng, spawn_rng

__all__ = [
    "ForwardCache",
    "GradientSet",
    "MlpModel",
    "NumericsError",
    "OptimizerState",
    "as_matrix",
    "backward",
    "check_finite",
    "clip_by_global_norm",
    "forward",
    "global_norm",
    "init_mlp",
    "load_mlp",
    "make_rng",
    "optimizer_step",
    "save_mlp",
    "spawn_rng",
]
