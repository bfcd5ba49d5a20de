"""Deterministic seed derivation.

All randomness in the library flows from explicit integer seeds.  Sub-seeds
are derived by hashing, never by Python's salted hash(), so runs are
reproducible across processes and platforms.
"""

from __future__ import annotations

import hashlib
import random
from typing import Union

Seedable = Union[int, str]


def derive_seed(*parts: Seedable) -> int:
    """Stable 64-bit seed from a master seed and a label path."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def spawn(*parts: Seedable) -> random.Random:
    """Fresh deterministic generator for the given label path."""
    return random.Random(derive_seed(*parts))
