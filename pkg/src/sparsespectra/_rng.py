"""Seeded, splittable random streams.

Every sampler in the package draws from a Philox counter-based generator
keyed by ``(seed, *tags)``.  Distinct tags give statistically independent
streams, so concurrent generation stays reproducible: the stream for one
purpose never depends on how many draws another purpose consumed.
"""

from __future__ import annotations

import zlib

import numpy as np


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError(f"stream tags must be nonnegative, got {tag}")
        return int(tag)
    if isinstance(tag, str):
        # crc32 is stable across processes (unlike hash()).
        return zlib.crc32(tag.encode("utf-8"))
    raise TypeError(f"unsupported stream tag type: {type(tag)!r}")


def stream(seed: int, *tags) -> np.random.Generator:
    """Return a Generator for the stream keyed by ``(seed, *tags)``."""
    key = tuple(_tag_to_int(t) for t in tags)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))
