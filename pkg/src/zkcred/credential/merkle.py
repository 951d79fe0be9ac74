"""Binary Poseidon Merkle trees over a power-of-two number of leaves."""

from dataclasses import dataclass
from typing import List

from ..arith.poseidon import hash2


class ArityError(ValueError):
    pass


@dataclass(frozen=True)
class MerklePath:
    siblings: List[int]
    # 0: the running node is the left child at that level, 1: it is the right child
    directions: List[int]

    def __post_init__(self):
        if len(self.siblings) != len(self.directions):
            raise ValueError("siblings and directions differ in length")

    @property
    def depth(self) -> int:
        return len(self.siblings)


def _check_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ArityError(f"leaf count {n} is not a power of two")
    return n.bit_length() - 1


def merkle_levels(leaves) -> List[List[int]]:
    """All levels from the leaves (index 0) up to the root."""
    _check_pow2(len(leaves))
    levels = [[int(x) for x in leaves]]
    while len(levels[-1]) > 1:
        cur = levels[-1]
        levels.append([hash2(cur[i], cur[i + 1]) for i in range(0, len(cur), 2)])
    return levels


def merkle_root(leaves) -> int:
    return merkle_levels(leaves)[-1][0]


def merkle_prove(leaves, index: int) -> MerklePath:
    if not 0 <= index < len(leaves):
        raise IndexError(f"leaf index {index} out of range")
    levels = merkle_levels(leaves)
    siblings, directions = [], []
    for level in levels[:-1]:
        siblings.append(level[index ^ 1])
        directions.append(index & 1)
        index >>= 1
    return MerklePath(siblings, directions)


def path_root(leaf: int, path: MerklePath) -> int:
    node = int(leaf)
    for sib, d in zip(path.siblings, path.directions):
        node = hash2(sib, node) if d else hash2(node, sib)
    return node


def merkle_verify(leaf: int, index: int, path: MerklePath, root: int) -> bool:
    bits = [(index >> i) & 1 for i in range(path.depth)]
    if bits != list(path.directions) or index >> path.depth:
        return False
    return path_root(leaf, path) == int(root)
