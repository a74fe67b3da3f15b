"""Deterministic random-stream derivation.

Every stochastic routine in the toolkit takes an explicit numpy Generator.
Substreams are derived from (master seed, index path) with the counter-based
Philox generator, so a trial or sweep point can be regenerated in isolation
and results never depend on execution order or thread count.
"""
from __future__ import annotations

import numpy as np


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for one (seed, index, ...) cell.

    The same (master_seed, path) always yields a bit-identical stream;
    distinct paths yield statistically independent streams.
    """
    if master_seed < 0:
        raise ValueError(f"master_seed must be >= 0, got {master_seed}")
    if any(i < 0 for i in path):
        raise ValueError(f"substream path indices must be >= 0, got {path}")
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(seq))
