"""Named random substreams derived from a single run seed."""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    return zlib.crc32(str(part).encode("utf-8"))


def derive_seed(seed: int, name: str, *keys) -> int:
    """A 64-bit seed for component ``name``; adding components never shifts others."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, _key(name), *(_key(k) for k in keys)])
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def substream(seed: int, name: str, *keys) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, name, *keys))
