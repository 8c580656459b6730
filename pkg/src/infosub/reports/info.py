"""Seven-cell information reports over (representation, condition, target).

Every measured cell uses a training-free estimator so the numbers are
independent of the critics that drove training. The two conditional cells
are exact arithmetic consequences of measured cells, never re-estimated:
H(Y|X) = H(Y) - I(X;Y) and I(Z;Y|X) = I(Z,X;Y) - I(X;Y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..mi import OracleConfig, ksg_mi, plugin_entropy
from ..numerics import as_matrix


@dataclass
class InfoReport:
    i_xy: float  # bits, all cells
    h_y: float
    h_y_given_x: float
    i_zy: float
    i_zx: float
    i_zxy: float
    i_zy_given_x: float
    estimators: dict[str, str] = field(default_factory=dict)

    CELLS = ("i_xy", "h_y", "h_y_given_x", "i_zy", "i_zx", "i_zxy",
             "i_zy_given_x")

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in self.CELLS}
        out["estimators"] = dict(self.estimators)
        return out


def information_report(z, x, y,
                       oracle: OracleConfig | None = None) -> InfoReport:
    """Measure the report cells for representation z, condition x, target y."""
    cfg = oracle or OracleConfig()
    z = as_matrix(z, "z")
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")

    i_xy = ksg_mi(x, y, cfg).value_bits
    i_zy = ksg_mi(z, y, cfg).value_bits
    i_zx = ksg_mi(z, x, cfg).value_bits
    i_zxy = ksg_mi(np.concatenate([z, x], axis=1), y, cfg).value_bits
    tags = {"i_xy": "ksg", "i_zy": "ksg", "i_zx": "ksg", "i_zxy": "ksg",
            "h_y_given_x": "identity", "i_zy_given_x": "identity"}

    if y.shape[1] == 1:
        h_y = plugin_entropy(y, cfg).value_bits
        tags["h_y"] = "plugin"
    else:
        h_y = math.nan  # histogram entropy is univariate only
        tags["h_y"] = "unavailable"

    return InfoReport(
        i_xy=i_xy, h_y=h_y, h_y_given_x=h_y - i_xy,
        i_zy=i_zy, i_zx=i_zx, i_zxy=i_zxy,
        i_zy_given_x=i_zxy - i_xy, estimators=tags)
