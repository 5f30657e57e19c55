"""Seeded random streams.

Every random choice in a session comes from a named substream derived from
the master seed, so switching an attack on or off never shifts the draws an
honest party makes.
"""
import hashlib

import numpy as np


def derive_seed(seed: int, tag: str) -> int:
    digest = hashlib.blake2b(f"{int(seed)}/{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """A reproducible stream of uniform draws bound to ``(seed, tag)``."""

    def __init__(self, seed: int = 0, tag: str = ""):
        self.seed = int(seed)
        self.tag = tag
        self._gen = np.random.Generator(np.random.PCG64(derive_seed(seed, tag)))
        self.draws = 0

    def __repr__(self):
        return f"RngStream(seed={self.seed}, tag={self.tag!r}, draws={self.draws})"

    def substream(self, tag: str) -> "RngStream":
        return RngStream(self.seed, f"{self.tag}/{tag}" if self.tag else tag)

    def random(self) -> float:
        self.draws += 1
        return float(self._gen.random())

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def index(self, n: int) -> int:
        """Uniform integer in ``range(n)``."""
        return min(int(self.random() * n), n - 1)

    def bit(self) -> int:
        return self.index(2)
