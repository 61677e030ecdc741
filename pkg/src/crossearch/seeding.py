"""Deterministic random-number streams.

All randomness in this package flows through numpy's PCG64 generator.  Streams
are derived by a single documented rule:

    child = Generator(PCG64(SeedSequence([parent_seed, i1, i2, ...])))

where ``parent_seed`` is a caller-supplied unsigned 64-bit integer and the
``i``s are small non-negative stream indices (instance number, algorithm id,
repeat number, ...).  Two streams with different index tuples are statistically
independent, and every stream is reproducible bit-for-bit on one build from the
integers alone -- no generator state is ever shared or advanced across calls.
"""
from __future__ import annotations

import numpy as np

__all__ = ["split_seed", "stream"]


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def split_seed(seed: int, *indices: int) -> int:
    """Derive a child seed from ``seed`` and one or more stream indices."""
    seq = np.random.SeedSequence([_check_seed(seed), *map(int, indices)])
    return int(seq.generate_state(1, np.uint64)[0])


def stream(seed: int, *indices: int) -> np.random.Generator:
    """Return the generator for stream ``indices`` of the given master seed."""
    seq = np.random.SeedSequence([_check_seed(seed), *map(int, indices)])
    return np.random.Generator(np.random.PCG64(seq))
