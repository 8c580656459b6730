"""Four-species predator-prey simulator (wolves, sheep, rabbits, grass).

The dynamics are an explicit discrete map, not an ODE solve: each step adds
population * rate / delta_t to every series simultaneously. Large delta_t
keeps the trajectories bounded and oscillatory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tabular import ColumnSpec, DataError, Dataset


@dataclass
class LvParams:
    w0: float = 9.0
    s0: float = 10.0
    r0: float = 10.0
    g0: float = 100.0
    a: tuple[float, float, float] = (9.0, 0.3, 0.1)   # wolves: -a0 + a1*S + a2*R
    b: tuple[float, float, float] = (2.0, 0.2, 0.6)   # sheep:   b0 - b1*W + b2*G
    c: tuple[float, float, float] = (3.0, 0.2, 0.8)   # rabbits: c0 - c1*W + c2*G
    d: tuple[float, float, float] = (23.0, 0.6, 0.3)  # grass:   d0 - d1*S - d2*R
    delta_t: float = 800.0
    steps: int = 1500

    def validate(self) -> None:
        if min(self.w0, self.s0, self.r0, self.g0) <= 0:
            raise DataError("initial populations must be positive")
        if self.delta_t <= 0:
            raise DataError("delta_t must be positive")
        if self.steps < 1:
            raise DataError("steps must be >= 1")


def lv_step(w: float, s: float, r: float, g: float,
            params: LvParams) -> tuple[float, float, float, float]:
    """One simultaneous update of all four populations."""
    a, b, c, d = params.a, params.b, params.c, params.d
    inv = 1.0 / params.delta_t
    return (w + inv * w * (-a[0] + a[1] * s + a[2] * r),
            s + inv * s * (b[0] - b[1] * w + b[2] * g),
            r + inv * r * (c[0] - c[1] * w + c[2] * g),
            g + inv * g * (d[0] - d[1] * s - d[2] * r))


def simulate_lotka_volterra(params: LvParams | None = None) -> Dataset:
    """Run the map for params.steps steps; one row per post-update state.

    Fails loudly (with the step index) if any population leaves (0, inf).
    """
    params = params or LvParams()
    params.validate()
    w, s, r, g = params.w0, params.s0, params.r0, params.g0
    rows = np.empty((params.steps, 4))
    for i in range(params.steps):
        w, s, r, g = lv_step(w, s, r, g, params)
        if not all(np.isfinite(v) and v > 0 for v in (w, s, r, g)):
            raise DataError(
                f"dynamics left the positive orthant at step {i + 1}: "
                f"W={w}, S={s}, R={r}, G={g}")
        rows[i] = (w, s, r, g)
    t = (np.arange(params.steps, dtype=np.float64) + 1.0) * params.delta_t
    columns = [ColumnSpec(n, "continuous") for n in ("W", "S", "R", "G", "t")]
    arrays = {"W": rows[:, 0], "S": rows[:, 1], "R": rows[:, 2],
              "G": rows[:, 3], "t": t}
    return Dataset(columns=columns, arrays=arrays)
