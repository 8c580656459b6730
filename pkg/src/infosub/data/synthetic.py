"""Generated datasets with known structure.

The fair-learning set models researchers from three countries: output Y is
skill V times writing quality W, where only W depends on country X. A
representation of Y that sheds X should keep roughly the information V
carries and no more.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import make_rng
from .tabular import ColumnSpec, DataError, Dataset


@dataclass
class FairSynthConfig:
    n: int = 1500
    country_priors: tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
    w_means: tuple[float, ...] = (0.7, 0.5, 0.3)
    w_stds: tuple[float, ...] = (0.05, 0.1, 0.07)
    # skill is country-independent, positive so y = v*w keeps w's ordering
    v_mean: float = 1.0
    v_std: float = 0.2

    def validate(self) -> None:
        if self.n < 1:
            raise DataError("n must be >= 1")
        k = len(self.country_priors)
        if len(self.w_means) != k or len(self.w_stds) != k:
            raise DataError("priors, means, and stds must have equal length")
        if abs(sum(self.country_priors) - 1.0) > 1e-9:
            raise DataError("country priors must sum to 1")
        if any(s <= 0 for s in self.w_stds) or self.v_std <= 0:
            raise DataError("standard deviations must be positive")


def _positive_normal(rng: np.random.Generator, mean: float, std: float,
                     n: int) -> np.ndarray:
    out = rng.normal(mean, std, size=n)
    while True:
        bad = out <= 0
        if not bad.any():
            return out
        out[bad] = rng.normal(mean, std, size=int(bad.sum()))


def gen_fair_synthetic(config: FairSynthConfig | None = None,
                       seed: int = 0) -> Dataset:
    """Columns X (protected country id), V, W (features), Y = V*W (target)."""
    cfg = config or FairSynthConfig()
    cfg.validate()
    rng = make_rng(seed)
    x = rng.choice(len(cfg.country_priors), size=cfg.n, p=cfg.country_priors)
    w = rng.normal(np.array(cfg.w_means)[x], np.array(cfg.w_stds)[x])
    v = _positive_normal(rng, cfg.v_mean, cfg.v_std, cfg.n)
    y = v * w
    columns = [
        ColumnSpec("X", "continuous", role="protected"),
        ColumnSpec("V", "continuous"),
        ColumnSpec("W", "continuous"),
        ColumnSpec("Y", "continuous", role="target"),
    ]
    arrays = {"X": x.astype(np.float64), "V": v, "W": w, "Y": y}
    return Dataset(columns=columns, arrays=arrays)


def gen_correlated_gaussians(n: int, rho: float, dim: int = 1,
                             seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Paired normals with per-dimension correlation rho.

    Ground truth for estimator checks: each dimension contributes
    -0.5*ln(1 - rho^2) nats of mutual information.
    """
    if not -1.0 < rho < 1.0:
        raise DataError(f"need |rho| < 1, got {rho}")
    if n < 1 or dim < 1:
        raise DataError("n and dim must be >= 1")
    rng = make_rng(seed)
    x = rng.normal(size=(n, dim))
    y = rho * x + np.sqrt(1.0 - rho * rho) * rng.normal(size=(n, dim))
    return x, y
