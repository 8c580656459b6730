"""Training-free information estimators used to cross-check the neural bounds.

The nearest-neighbour estimator follows the classic k-NN construction:
psi(k) + psi(n) - mean over samples of psi(n_x + 1) + psi(n_y + 1), with
distances in the max norm and neighbour counts taken with strict
inequality. Each coordinate is standardized first so the max-norm balls
weight all coordinates equally; without this, shrinking one coordinate's
scale can hide its structure from the neighbour counts. A tiny
deterministic jitter breaks the ties that duplicated rows would
otherwise create.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import digamma

from ..numerics import as_matrix, spawn_rng
from ..numerics.rng import SALT_JITTER
from .estimators import LN2, EstimationError, MiEstimate

JITTER_SCALE = 1e-10


@dataclass
class OracleConfig:
    ksg_neighbors: int = 5
    plugin_bins: int = 32
    jitter_seed: int = 0


def _standardize(x: np.ndarray) -> np.ndarray:
    std = np.std(x, axis=0)
    std[std == 0.0] = 1.0  # constant column: shift only
    return (x - np.mean(x, axis=0)) / std


def _jitter(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    scale = np.maximum(np.std(x, axis=0), 1.0)
    return x + rng.normal(0.0, JITTER_SCALE, size=x.shape) * scale


def ksg_mi(x, y, config: OracleConfig | None = None) -> MiEstimate:
    """k-nearest-neighbour mutual information between two continuous blocks."""
    cfg = config or OracleConfig()
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    n = x.shape[0]
    if y.shape[0] != n:
        raise EstimationError(f"row-count mismatch: {n} vs {y.shape[0]}")
    k = cfg.ksg_neighbors
    if not 1 <= k < n:
        raise EstimationError(f"need 1 <= k < n, got k={k}, n={n}")

    rng = spawn_rng(cfg.jitter_seed, SALT_JITTER)
    x = _jitter(_standardize(x), rng)
    y = _jitter(_standardize(y), rng)
    xy = np.concatenate([x, y], axis=1)

    joint_tree = cKDTree(xy)
    # distance to the k-th neighbour, excluding the point itself
    dist, _ = joint_tree.query(xy, k=k + 1, p=np.inf)
    eps = dist[:, k]

    # strict inequality: shrink the radius to the next float toward zero
    radius = np.nextafter(eps, 0)
    n_x = cKDTree(x).query_ball_point(x, radius, p=np.inf, return_length=True) - 1
    n_y = cKDTree(y).query_ball_point(y, radius, p=np.inf, return_length=True) - 1

    value = float(digamma(k) + digamma(n)
                  - np.mean(digamma(n_x + 1) + digamma(n_y + 1)))
    return MiEstimate(value_nats=value, batch_size=n, estimator="ksg")


def plugin_entropy(x, config: OracleConfig | None = None) -> MiEstimate:
    """Histogram entropy in bits over equal-width bins spanning the data range.

    One-dimensional input only; the value is stored in the nats field of the
    estimate after conversion, so value_bits is the natural reading.
    """
    cfg = config or OracleConfig()
    x = as_matrix(x, "x")
    if x.shape[1] != 1:
        raise EstimationError(f"plugin entropy is univariate, got {x.shape[1]} cols")
    v = x[:, 0]
    lo, hi = float(np.min(v)), float(np.max(v))
    if lo == hi:
        return MiEstimate(value_nats=0.0, batch_size=v.size, estimator="plugin")
    counts, _ = np.histogram(v, bins=cfg.plugin_bins, range=(lo, hi))
    p = counts[counts > 0] / v.size
    bits = float(-np.sum(p * np.log2(p)))
    return MiEstimate(value_nats=bits * LN2, batch_size=v.size, estimator="plugin")


def gaussian_mi_nats(rho: float) -> float:
    """Closed-form mutual information of a bivariate normal with correlation rho."""
    if not -1.0 < rho < 1.0:
        raise EstimationError(f"need |rho| < 1, got {rho}")
    return -0.5 * float(np.log1p(-rho * rho))
