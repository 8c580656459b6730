"""Mutual-information estimation: neural lower bounds and training-free oracles."""

from .estimators import (
    Critic,
    EstimationError,
    MiEstimate,
    critic_train_step,
    dv_estimate,
    dv_value,
    make_critic,
    make_marginal_blocks,
    nats_to_bits,
    shuffle_marginal,
    smile_estimate,
    smile_score_grads,
    smile_value,
)
from .oracles import OracleConfig, gaussian_mi_nats, ksg_mi, plugin_entropy

__all__ = [
    "Critic",
    "EstimationError",
    "MiEstimate",
    "OracleConfig",
    "critic_train_step",
    "dv_estimate",
    "dv_value",
    "gaussian_mi_nats",
    "ksg_mi",
    "make_critic",
    "make_marginal_blocks",
    "nats_to_bits",
    "plugin_entropy",
    "shuffle_marginal",
    "smile_estimate",
    "smile_score_grads",
    "smile_value",
]
