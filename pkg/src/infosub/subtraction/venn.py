"""Iterative sector decomposition of a three-variable information diagram.

Repeated subtraction runs carve the target's information into disjoint
regions: first everything beyond both side variables, then what is shared
with exactly one of them, finally the triple overlap. Each later run
conditions on the representations produced earlier.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..mi import OracleConfig, ksg_mi
from ..numerics import as_matrix
from .trainer import SubtractionConfig, TrainedSubtractor, train_information_subtraction


@dataclass
class VennSector:
    name: str
    conditioned_on: tuple[str, ...]
    subtractor: TrainedSubtractor
    z: np.ndarray
    i_z_target_given_cond: float  # bits; identity I(Z,cond;G) - I(cond;G)
    i_z_cond: float
    i_target_cond: float


@dataclass
class VennDecomposition:
    target_name: str
    side_names: tuple[str, str]
    sectors: list[VennSector]
    base: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "target": self.target_name,
            "sides": list(self.side_names),
            "base": dict(self.base),
            "sectors": {
                s.name: {
                    "conditioned_on": list(s.conditioned_on),
                    "i_z_target_given_cond": s.i_z_target_given_cond,
                    "i_z_cond": s.i_z_cond,
                    "i_target_cond": s.i_target_cond,
                } for s in self.sectors
            },
        }

    def render_text(self) -> str:
        from ..reports.render import _table
        headers = ["sector", "conditioned on", "I(Z;T|cond)", "I(Z;cond)",
                   "I(T;cond)"]
        rows = [[s.name, "+".join(s.conditioned_on),
                 f"{s.i_z_target_given_cond:.2f}", f"{s.i_z_cond:.2f}",
                 f"{s.i_target_cond:.2f}"] for s in self.sectors]
        base = ", ".join(f"{k}={v:.2f}" for k, v in self.base.items())
        return (f"sector decomposition of {self.target_name} against "
                f"{self.side_names[0]}, {self.side_names[1]}\n"
                + _table(headers, rows) + f"base: {base}\n")


def _sector_quantities(z, cond, target, oracle: OracleConfig
                       ) -> tuple[float, float, float]:
    i_zc_t = ksg_mi(np.concatenate([z, cond], axis=1), target, oracle).value_bits
    i_c_t = ksg_mi(cond, target, oracle).value_bits
    i_z_c = ksg_mi(z, cond, oracle).value_bits
    return i_zc_t - i_c_t, i_z_c, i_c_t


def venn_decompose(target, side_a, side_b, config: SubtractionConfig,
                   names: tuple[str, str, str] = ("G", "S", "W"),
                   oracle: OracleConfig | None = None, log_every: int = 0,
                   log=print) -> VennDecomposition:
    """Decompose `target` against two side variables.

    Runs four subtraction trainings whose conditions chain on earlier
    sectors: target beyond both sides; shared with the first side only;
    shared with the second side only; the triple overlap.
    """
    oracle = oracle or OracleConfig()
    t = as_matrix(target, names[0])
    a = as_matrix(side_a, names[1])
    b = as_matrix(side_b, names[2])
    t_name, a_name, b_name = names

    plan = [
        ("beyond_both", (a_name, b_name)),
        (f"shared_{a_name}_only", (b_name, "beyond_both")),
        (f"shared_{b_name}_only", (a_name, "beyond_both")),
        ("shared_all", ("beyond_both", f"shared_{a_name}_only",
                        f"shared_{b_name}_only")),
    ]
    available: dict[str, np.ndarray] = {a_name: a, b_name: b}
    sectors: list[VennSector] = []
    for i, (name, cond_names) in enumerate(plan):
        cond = np.concatenate([available[c] for c in cond_names], axis=1)
        cfg = replace(config, seed=config.seed + i)
        if log_every:
            log(f"sector {name}: conditioning on {'+'.join(cond_names)}")
        sub = train_information_subtraction(cfg, condition=cond, target=t,
                                            log_every=log_every, log=log)
        z = sub.represent(t)
        given, leak, base = _sector_quantities(z, cond, t, oracle)
        sectors.append(VennSector(name=name, conditioned_on=cond_names,
                                  subtractor=sub, z=z,
                                  i_z_target_given_cond=given,
                                  i_z_cond=leak, i_target_cond=base))
        available[name] = z

    base = {
        f"i_{t_name}_{a_name}".lower(): ksg_mi(t, a, oracle).value_bits,
        f"i_{t_name}_{b_name}".lower(): ksg_mi(t, b, oracle).value_bits,
        f"i_{t_name}_{a_name}{b_name}".lower(): ksg_mi(
            t, np.concatenate([a, b], axis=1), oracle).value_bits,
    }
    return VennDecomposition(target_name=t_name, side_names=(a_name, b_name),
                             sectors=sectors, base=base)
