"""Deterministic derivation of independent RNG streams for parallel work units.

Every trial, sweep cell, and selection step gets its own stream derived from
the master seed plus a token path (e.g. ``("situational", tier, trial)``).
Streams depend only on the tokens, never on scheduling, so serial and
parallel executions of the same experiment are bit-identical.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_rng", "derive_seed_sequence", "spawn_kernel_seed"]


def _token_digest(tokens: tuple[object, ...]) -> list[int]:
    """Hash a token path into four 32-bit words (stable across platforms)."""
    h = hashlib.blake2s()
    for tok in tokens:
        h.update(repr(tok).encode("utf-8"))
        h.update(b"\x1f")
    digest = h.digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def derive_seed_sequence(master_seed: int, *tokens: object) -> np.random.SeedSequence:
    """Build a SeedSequence keyed by the master seed and a token path."""
    entropy = [master_seed & 0xFFFFFFFFFFFFFFFF]
    if tokens:
        entropy.extend(_token_digest(tokens))
    return np.random.SeedSequence(entropy)


def derive_rng(master_seed: int, *tokens: object) -> np.random.Generator:
    """Return an independent, reproducible generator for one unit of work."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(master_seed, *tokens)))


def spawn_kernel_seed(rng: np.random.Generator) -> int:
    """Draw a 32-bit seed for the propagation kernel's internal RNG."""
    return int(rng.integers(0, 2**32, dtype=np.uint64))
