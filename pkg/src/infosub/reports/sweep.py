"""Leak-weight sensitivity sweep over full subtraction runs.

Each weight gets an independent run (seed = base seed + index) and an
oracle-measured information-plane point: how much target information the
representation kept versus how much condition information leaked through.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..mi import OracleConfig
from ..subtraction.trainer import (
    DiagnosticsTrace,
    SubtractionConfig,
    train_information_subtraction,
)
from .info import information_report


@dataclass
class SweepPoint:
    leak_weight: float
    i_full_bits: float  # I(Z,X;Y), information kept about the target
    i_leak_bits: float  # I(Z;X), information leaked about the condition
    trace: DiagnosticsTrace | None = None


@dataclass
class SweepResult:
    points: list[SweepPoint]

    def to_csv(self) -> str:
        lines = ["leak_weight,i_full_bits,i_leak_bits"]
        for p in self.points:
            lines.append(f"{p.leak_weight:.17g},{p.i_full_bits:.17g},"
                         f"{p.i_leak_bits:.17g}")
        return "\n".join(lines) + "\n"


def lambda_sweep(base_config: SubtractionConfig, weights, condition, target,
                 oracle: OracleConfig | None = None, log_every: int = 0,
                 log=print) -> SweepResult:
    weights = [float(w) for w in weights]
    if len(weights) < 2:
        raise ValueError("sweep needs at least 2 weights")
    if sorted(weights) != weights or len(set(weights)) != len(weights):
        raise ValueError("weights must be strictly increasing")
    points = []
    for i, w in enumerate(weights):
        cfg = replace(base_config, leak_weight=w, seed=base_config.seed + i)
        sub = train_information_subtraction(cfg, condition, target,
                                            log_every=log_every, log=log)
        z = sub.represent(target)
        report = information_report(z, condition, target, oracle)
        points.append(SweepPoint(leak_weight=w, i_full_bits=report.i_zxy,
                                 i_leak_bits=report.i_zx, trace=sub.trace))
        if log_every:
            log(f"sweep point {i}: weight={w} kept={report.i_zxy:.3f} "
                f"leak={report.i_zx:.3f} bits")
    return SweepResult(points=points)
