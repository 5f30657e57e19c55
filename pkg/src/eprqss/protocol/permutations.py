"""Order-rearrangement operations on a group of four particles.

``mapping[j]`` is the original position of the particle placed at sequence
position ``j``; E1 sends (c1, c2, c3, c4) to (c2, c1, c4, c3).
"""
import itertools
import math
from dataclasses import dataclass

GROUP_SIZE = 4


@dataclass(frozen=True)
class Permutation:
    index: int
    name: str
    mapping: tuple

    @property
    def inverse(self) -> tuple:
        inv = [0] * len(self.mapping)
        for j, i in enumerate(self.mapping):
            inv[i] = j
        return tuple(inv)

    def rearrange(self, seq):
        return [seq[i] for i in self.mapping]

    def restore(self, seq):
        out = [None] * len(seq)
        for j, i in enumerate(self.mapping):
            out[i] = seq[j]
        return out

    def partner_position(self, b_position: int) -> int:
        """Sequence position of the partner of the B particle at ``b_position``."""
        return self.inverse[b_position]


# identity and the three double transpositions; any two differ at every position
E0 = Permutation(0, "E0", (0, 1, 2, 3))
E1 = Permutation(1, "E1", (1, 0, 3, 2))
E2 = Permutation(2, "E2", (2, 3, 0, 1))
E3 = Permutation(3, "E3", (3, 2, 1, 0))
STANDARD = (E0, E1, E2, E3)

FULL = tuple(
    Permutation(i, f"S{i:02d}", m)
    for i, m in enumerate(itertools.permutations(range(GROUP_SIZE)))
)


def alphabet(size: int) -> tuple:
    """The permutation set Alice draws from: 1, 4 (E0..E3) or 24 (all of S4)."""
    if size == 1:
        return (E0,)
    if size == 4:
        return STANDARD
    if size == 24:
        return FULL
    raise ValueError(f"unsupported permutation alphabet size {size}; use 1, 4 or 24")


def reveal_bits(size: int) -> int:
    return math.ceil(math.log2(size)) if size > 1 else 0
