"""Flat binary checkpoints for MLP parameters.

Layout: one UTF-8 header line (magic, json with layer_dims and activation),
then all weights followed by all biases as little-endian float64, each
flattened row-major.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .mlp import MlpModel, NumericsError

_MAGIC = "INFOSUB-MLP-1"


def save_mlp(model: MlpModel, path: str | Path) -> None:
    header = json.dumps({
        "magic": _MAGIC,
        "layer_dims": list(model.layer_dims),
        "hidden_activation": model.hidden_activation,
    })
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        for arr in model.weights + model.biases:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_mlp(path: str | Path) -> MlpModel:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("magic") != _MAGIC:
            raise NumericsError(f"{path}: not an MLP checkpoint")
        dims = [int(d) for d in header["layer_dims"]]
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            buf = fh.read(8 * fan_in * fan_out)
            weights.append(np.frombuffer(buf, dtype="<f8").reshape(fan_in, fan_out).copy())
        for fan_out in dims[1:]:
            buf = fh.read(8 * fan_out)
            biases.append(np.frombuffer(buf, dtype="<f8").copy())
    return MlpModel(layer_dims=dims, weights=weights, biases=biases,
                    hidden_activation=header["hidden_activation"])
