"""Seeded, counter-based random streams.

Every random draw in heiscr goes through :func:`stream`, which keys a Philox
generator from ``(seed, *keys)``.  Philox is counter based, so the same keys
give the same stream on every platform, and independent tasks get
independent streams by passing a task index as an extra key.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream(seed: int, *keys: int | str) -> np.random.Generator:
    """Return the generator for ``seed`` and the derived task ``keys``.

    String keys are hashed with CRC-32 so check names can key streams.
    """
    words = [_word(seed)] + [_word(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def _word(key: int | str) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    key = int(key)
    # SeedSequence only takes non-negative entropy; interleave signs.
    return 2 * key if key >= 0 else -2 * key - 1
