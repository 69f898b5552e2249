"""Deterministic stream splitting: every random run hashes one named seed.

The per-trial rule is fixed and documented: stream(seed, *path) seeds a
PCG64 generator from SHA-256 of "seed/path0/path1/...".  No ambient entropy
is used anywhere in the package.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream_words(seed: int, *path) -> list:
    text = "/".join([str(int(seed))] + [str(p) for p in path])
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return [int.from_bytes(digest[i:i + 8], "little") for i in range(0, 32, 8)]


def trial_rng(seed: int, *path) -> np.random.Generator:
    """Independent generator for (seed, trial-path); reproducible everywhere."""
    return np.random.Generator(np.random.PCG64(stream_words(seed, *path)))


def as_generator(seed) -> np.random.Generator:
    """Accept either a seed integer or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return trial_rng(int(seed))
