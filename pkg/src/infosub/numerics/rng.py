"""Seeded random streams.

Every stochastic component takes an integer seed and builds its stream
through here, so a run is a pure function of its config.
"""

from __future__ import annotations

import numpy as np

# Fixed salts so independently-seeded components never share a stream even
# when given the same base seed.
SALT_MODEL_INIT = 101
SALT_BATCHES = 211
SALT_SHUFFLE = 307
SALT_JITTER = 401
SALT_NOISE = 503


def make_rng(seed: int) -> np.random.Generator:
    """Generator for `seed`; same seed and call sequence give the same stream."""
    return np.random.default_rng(int(seed))


def spawn_rng(seed: int, salt: int) -> np.random.Generator:
    """Independent generator derived from (seed, salt)."""
    return np.random.default_rng([int(seed), int(salt)])
