"""Seeded RNG streams, split per subsystem by fixed labels.

One root seed drives a run; every subsystem (traffic, noise, channel, ...)
draws from its own stream so adding a consumer never perturbs the others.
"""

from __future__ import annotations

import hashlib
import random


def substream(root_seed: int, label: str) -> random.Random:
    """Independent deterministic stream for (root_seed, label)."""
    digest = hashlib.sha256(f"{root_seed}:{label}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))
