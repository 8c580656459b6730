"""Group-fairness metrics over a binary protected attribute.

TPR_{c,y} is the recall of class y within protected group c. The per-class
gap is TPR_{0,y} - TPR_{1,y}; classes where either group has no positives
are excluded from the gap aggregates (with a warning) since their rate is
undefined.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class FairnessError(ValueError):
    """Empty inputs or labels outside the expected alphabet."""


@dataclass
class FairnessReport:
    accuracy: float
    ba: float  # mean per-class recall
    gap_rms: float
    gap_max: float
    tpr: dict[tuple[int, int], float] = field(default_factory=dict)
    gaps: dict[int, float] = field(default_factory=dict)
    excluded_cells: list[tuple[int, int]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy, "ba": self.ba,
            "gap_rms": self.gap_rms, "gap_max": self.gap_max,
            "tpr": {f"group{c}_class{y}": v for (c, y), v in self.tpr.items()},
            "gaps": {f"class{y}": v for y, v in self.gaps.items()},
            "excluded_cells": [f"group{c}_class{y}"
                               for c, y in self.excluded_cells],
        }


def fairness_metrics(preds, truth, protected) -> FairnessReport:
    preds = np.asarray(preds).ravel().astype(np.int64)
    truth = np.asarray(truth).ravel().astype(np.int64)
    protected = np.asarray(protected).ravel().astype(np.int64)
    n = preds.size
    if n == 0:
        raise FairnessError("empty inputs")
    if truth.size != n or protected.size != n:
        raise FairnessError("length mismatch")
    if not set(np.unique(protected)) <= {0, 1}:
        raise FairnessError(f"protected values must be 0/1, got "
                            f"{sorted(set(np.unique(protected)))}")

    classes = np.unique(truth)
    accuracy = float(np.mean(preds == truth))

    recalls = []
    tpr: dict[tuple[int, int], float] = {}
    excluded: list[tuple[int, int]] = []
    for y in classes:
        in_class = truth == y
        recalls.append(float(np.mean(preds[in_class] == y)))
        for c in (0, 1):
            cell = in_class & (protected == c)
            if not cell.any():
                excluded.append((c, int(y)))
            else:
                tpr[(c, int(y))] = float(np.mean(preds[cell] == y))
    ba = float(np.mean(recalls))

    gaps: dict[int, float] = {}
    for y in classes:
        y = int(y)
        if (0, y) in tpr and (1, y) in tpr:
            gaps[y] = tpr[(0, y)] - tpr[(1, y)]
    if excluded:
        warnings.warn(f"classes with an empty protected-group cell excluded "
                      f"from gaps: {sorted(set(excluded))}", stacklevel=2)
    if gaps:
        values = np.array(list(gaps.values()))
        gap_rms = float(np.sqrt(np.mean(values ** 2)))
        gap_max = float(np.max(np.abs(values)))
    else:
        gap_rms = gap_max = 0.0

    return FairnessReport(accuracy=accuracy, ba=ba, gap_rms=gap_rms,
                          gap_max=gap_max, tpr=tpr, gaps=gaps,
                          excluded_cells=excluded)
