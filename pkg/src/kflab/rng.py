"""Seed derivation for reproducible, order-independent parallel trials.

One 64-bit base seed; every consumer derives its own sub-stream by hashing
(base, label, indices) with blake2s, so trial (i, j) sees the same stream
no matter which worker runs it or in what order.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["spawn_seed", "make_rng"]

_MASK = (1 << 64) - 1


def spawn_seed(base: int, label: str, *indices: int) -> int:
    """Derive a 64-bit sub-seed from (base, label, *indices)."""
    h = hashlib.blake2s(digest_size=8)
    h.update((base & _MASK).to_bytes(8, "little"))
    h.update(label.encode("utf-8"))
    for ix in indices:
        h.update((ix & _MASK).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator from a 64-bit seed; the stream is version-stable."""
    return np.random.default_rng(np.random.SeedSequence(seed & _MASK))
