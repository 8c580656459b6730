"""Variational mutual-information lower bounds with neural critics.

A critic scores concatenated variable blocks; the bound is the mean score
under paired batches minus the log mean exponentiated score under
product-of-marginals batches. The clipped variant bounds the exponentials
in the partition term to a fixed range for stable training. Internally
everything is in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import (
    ForwardCache,
    GradientSet,
    MlpModel,
    NumericsError,
    OptimizerState,
    as_matrix,
    backward,
    check_finite,
    forward,
    init_mlp,
    make_rng,
    optimizer_step,
)

LN2 = float(np.log(2.0))


class EstimationError(ValueError):
    """Empty batches, shape mismatches, or non-finite critic output."""


@dataclass
class MiEstimate:
    value_nats: float
    batch_size: int
    estimator: str  # dv | smile | ksg | plugin

    @property
    def value_bits(self) -> float:
        return self.value_nats / LN2


@dataclass
class Critic:
    """Scalar-output network over named input blocks."""

    model: MlpModel
    input_blocks: list[tuple[str, int]]

    def __post_init__(self) -> None:
        total = sum(d for _, d in self.input_blocks)
        if self.model.input_dim != total:
            raise EstimationError(
                f"critic input dim {self.model.input_dim} != sum of block dims {total}")
        if self.model.output_dim != 1:
            raise EstimationError("critic must have a single output")

    def concat(self, blocks: list[np.ndarray]) -> np.ndarray:
        if len(blocks) != len(self.input_blocks):
            raise EstimationError(
                f"expected {len(self.input_blocks)} blocks, got {len(blocks)}")
        mats = []
        for arr, (name, dim) in zip(blocks, self.input_blocks):
            m = as_matrix(arr, name)
            if m.shape[1] != dim:
                raise EstimationError(f"block {name!r}: expected {dim} cols, got {m.shape[1]}")
            mats.append(m)
        rows = {m.shape[0] for m in mats}
        if len(rows) != 1:
            raise EstimationError(f"blocks disagree on row count: {sorted(rows)}")
        return np.concatenate(mats, axis=1)

    def scores(self, blocks: list[np.ndarray]) -> tuple[np.ndarray, ForwardCache]:
        """Critic values for each row, with the cache for backprop."""
        out, cache = forward(self.model, self.concat(blocks))
        return check_finite(out[:, 0], "critic scores"), cache

    def input_grads(self, cache: ForwardCache, score_grad: np.ndarray) -> list[np.ndarray]:
        """d(loss)/d(each block) given d(loss)/d(score) per row; params untouched."""
        _, g_in = backward(self.model, cache, score_grad[:, None])
        out, offset = [], 0
        for _, dim in self.input_blocks:
            out.append(g_in[:, offset:offset + dim])
            offset += dim
        return out


def make_critic(block_dims: list[tuple[str, int]], hidden: tuple[int, ...],
                activation: str = "relu", seed: int = 0) -> Critic:
    total = sum(d for _, d in block_dims)
    model = init_mlp([total, *hidden, 1], activation=activation, seed=seed)
    return Critic(model=model, input_blocks=list(block_dims))


def shuffle_marginal(batch_a, batch_b, seed: int) -> np.ndarray:
    """batch_b with rows uniformly permuted, breaking its pairing with batch_a."""
    a = as_matrix(batch_a, "batch_a")
    b = as_matrix(batch_b, "batch_b")
    if a.shape[0] != b.shape[0]:
        raise EstimationError(
            f"row-count mismatch: {a.shape[0]} vs {b.shape[0]}")
    perm = make_rng(seed).permutation(b.shape[0])
    return b[perm]


def make_marginal_blocks(blocks: list[np.ndarray],
                         rng: np.random.Generator) -> tuple[list[np.ndarray], np.ndarray]:
    """Product-of-marginals batch: first block kept, the rest permuted jointly.

    Returns the new blocks and the permutation (needed to route gradients
    back to unpermuted rows).
    """
    n = as_matrix(blocks[0], "block 0").shape[0]
    perm = rng.permutation(n)
    return [blocks[0]] + [as_matrix(b, "block")[perm] for b in blocks[1:]], perm


def _log_mean_exp(t: np.ndarray, weights: np.ndarray | None) -> float:
    c = float(np.max(t))
    e = np.exp(t - c)
    if weights is None:
        return c + float(np.log(np.mean(e)))
    return c + float(np.log(np.sum(weights * e)))


def dv_value(t_joint: np.ndarray, t_marginal: np.ndarray,
             joint_weights: np.ndarray | None = None,
             marginal_weights: np.ndarray | None = None) -> float:
    """mean critic score under the joint minus log mean exp under the marginal.

    Optional weights replace the empirical means with exact expectations
    (each weight vector must sum to 1); used by enumeration oracles.
    """
    t_joint = np.asarray(t_joint, dtype=np.float64).ravel()
    t_marginal = np.asarray(t_marginal, dtype=np.float64).ravel()
    if t_joint.size == 0 or t_marginal.size == 0:
        raise EstimationError("empty batch")
    if not (np.all(np.isfinite(t_joint)) and np.all(np.isfinite(t_marginal))):
        raise EstimationError("non-finite critic outputs")
    if joint_weights is None:
        mean_joint = float(np.mean(t_joint))
    else:
        mean_joint = float(np.sum(np.asarray(joint_weights, dtype=np.float64) * t_joint))
    return mean_joint - _log_mean_exp(t_marginal, marginal_weights)


def smile_value(t_joint: np.ndarray, t_marginal: np.ndarray, tau: float,
                joint_weights: np.ndarray | None = None,
                marginal_weights: np.ndarray | None = None) -> float:
    """dv_value with the partition-term scores clamped to [-tau, tau]."""
    if tau <= 0:
        raise EstimationError("tau must be positive")
    t_marginal = np.asarray(t_marginal, dtype=np.float64)
    return dv_value(t_joint, np.clip(t_marginal, -tau, tau),
                    joint_weights, marginal_weights)


def smile_score_grads(t_joint: np.ndarray, t_marginal: np.ndarray,
                      tau: float | None) -> tuple[np.ndarray, np.ndarray]:
    """d(bound)/d(score) for each joint and marginal row.

    Joint rows contribute 1/n each; marginal rows contribute the negative
    softmax weight of their (clamped) score, zeroed where the clamp is
    active. tau=None gives the unclipped gradients.
    """
    t_joint = np.asarray(t_joint, dtype=np.float64).ravel()
    t_m = np.asarray(t_marginal, dtype=np.float64).ravel()
    g_joint = np.full(t_joint.shape, 1.0 / t_joint.size)
    if tau is None:
        clamped, mask = t_m, np.ones_like(t_m)
    else:
        clamped = np.clip(t_m, -tau, tau)
        mask = ((t_m > -tau) & (t_m < tau)).astype(np.float64)
    e = np.exp(clamped - np.max(clamped))
    g_marginal = -(e / np.sum(e)) * mask
    return g_joint, g_marginal


def dv_estimate(critic: Critic, joint: list[np.ndarray],
                marginal: list[np.ndarray]) -> MiEstimate:
    t_j, _ = critic.scores(joint)
    t_m, _ = critic.scores(marginal)
    return MiEstimate(value_nats=dv_value(t_j, t_m),
                      batch_size=t_j.size, estimator="dv")


def smile_estimate(critic: Critic, joint: list[np.ndarray],
                   marginal: list[np.ndarray], tau: float) -> MiEstimate:
    t_j, _ = critic.scores(joint)
    t_m, _ = critic.scores(marginal)
    return MiEstimate(value_nats=smile_value(t_j, t_m, tau),
                      batch_size=t_j.size, estimator="smile")


def _sigmoid(v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    e = np.exp(v[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def critic_train_step(critic: Critic, joint: list[np.ndarray],
                      marginal: list[np.ndarray], opt: OptimizerState,
                      tau: float) -> float:
    """One critic update; returns the post-step clipped bound in nats.

    The update maximizes the bounded logistic objective
    mean(-softplus(-T_joint)) - mean(softplus(T_marginal)), whose optimum
    is the pointwise log density ratio. Ascending the clipped bound
    directly is unstable: once every marginal score clears the clamp its
    gradient vanishes and the joint term pushes scores up without limit.
    The bound is therefore only evaluated, never ascended.
    """
    t_j, cache_j = critic.scores(joint)
    t_m, cache_m = critic.scores(marginal)
    g_j = -_sigmoid(-t_j)[:, None] / t_j.size
    g_m = _sigmoid(t_m)[:, None] / t_m.size
    grads_j, _ = backward(critic.model, cache_j, g_j)
    grads_m, _ = backward(critic.model, cache_m, g_m)
    grads_j.add_(grads_m)
    optimizer_step(critic.model, grads_j, opt)
    return smile_estimate(critic, joint, marginal, tau).value_nats


def nats_to_bits(nats: float) -> float:
    return nats / LN2
