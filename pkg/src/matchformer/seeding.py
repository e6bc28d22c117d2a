"""Deterministic seed derivation.

All randomness in the package flows from one master seed. Sub-seeds are
derived by hashing the master seed together with a string label, so
parallel and serial execution orders draw identical streams.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *labels) -> int:
    """Derive a 64-bit sub-seed from a master seed and any hashable labels."""
    text = ":".join([str(int(master))] + [str(x) for x in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & _MASK64


def rng_for(master: int, *labels) -> np.random.Generator:
    """A generator seeded from ``derive_seed(master, *labels)``."""
    return np.random.default_rng(derive_seed(master, *labels))
