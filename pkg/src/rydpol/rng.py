"""Deterministic random-stream derivation for Monte Carlo work.

Every stochastic stage of a run pulls its randomness from a counter-based
Philox generator keyed by (master_seed, stage, index).  Distinct labels give
statistically independent, non-overlapping streams, and a trial's draws do
not depend on how many other trials ran before it — so serial, chunked, and
parallel executions of the same labels produce bit-identical results.
"""

from __future__ import annotations

import numpy as np

#: Label capacity: stage fits in 16 bits, index in 48.
MAX_STAGE = 1 << 16
MAX_INDEX = 1 << 48


def philox_stream(master_seed, stage, index=0):
    """Independent ``numpy.random.Generator`` for the given stream label.

    master_seed is a 64-bit non-negative integer; stage numbers a pipeline
    step (cloud sampling, detection, clicks, ...) and index usually numbers
    the trial within that step.
    """
    for name, value, bound in (("master_seed", master_seed, 1 << 64),
                               ("stage", stage, MAX_STAGE),
                               ("index", index, MAX_INDEX)):
        if not isinstance(value, (int, np.integer)):
            raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
        if not 0 <= value < bound:
            raise ValueError(f"{name} must be in [0, {bound}), got {value}")
    key = np.array([master_seed, (int(stage) << 48) | int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def spawn_trial_seeds(master_seed, count):
    """Distinct 63-bit master seeds for derived experiments (e.g. replicates)."""
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    return philox_stream(master_seed, MAX_STAGE - 1).integers(1 << 63, size=int(count))
