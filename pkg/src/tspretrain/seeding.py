"""Deterministic seed derivation.

Every random decision in the package flows from one master seed through
named sub-streams, so any component can be re-seeded independently and
execution order never changes results.
"""

from __future__ import annotations

from hashlib import blake2b

import numpy as np
import torch

_SEED_SPACE = 2**63 - 1


def derive_seed(master_seed: int, *parts: object) -> int:
    """Derive a child seed from a master seed and a path of name parts.

    The derivation is a keyed hash, so it is stable across platforms,
    processes, and library versions.
    """
    h = blake2b(digest_size=8)
    h.update(str(int(master_seed)).encode("utf-8"))
    for part in parts:
        h.update(b"|")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "big") % _SEED_SPACE


def numpy_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


def torch_generator(seed: int) -> torch.Generator:
    g = torch.Generator()
    g.manual_seed(int(seed) % (2**63))
    return g
