"""Seed derivation so that parallel units and pipeline stages get independent streams."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, *keys: int | str) -> int:
    """Derive a stable child seed from a master seed and a key path.

    String keys are hashed so that e.g. subreddit names map to stable integers
    across runs and platforms.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed)).encode())
    for key in keys:
        h.update(b"\x00")
        h.update(str(key).encode())
    return int.from_bytes(h.digest(), "little")


def derived_rng(master_seed: int, *keys: int | str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *keys))
