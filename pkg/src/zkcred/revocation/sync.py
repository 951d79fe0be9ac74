"""Holder-side registry state: delta replay and hybrid synchronization.

A hybrid client keeps one bottom subtree (say the quarter holding its own
leaf) up to date from the delta stream, and fetches every node of the
upper levels in one request.  Because the request is the same for every
holder, the server learns nothing about which leaf the holder cares about.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..credential.merkle import MerklePath, merkle_root
from .registry import (
    BITS_PER_LEAF, FULL_LEAF, NODE_BYTES, VALID, BitmapTree, NonRevocationWitness, RegistryError,
    RevokedError, StatusDelta, SyncError, locate,
)


@dataclass
class SyncPlan:
    depth: int
    subtree_level: int        # level of the locally stored subtree's root, leaves = 0
    subtree_index: int
    stored_nodes: int
    fetched: List[Tuple[int, int]]

    @property
    def stored_bytes(self) -> int:
        return self.stored_nodes * NODE_BYTES

    @property
    def fetched_bytes(self) -> int:
        return len(self.fetched) * NODE_BYTES


def _fraction_level(depth: int, subtree_fraction: float) -> int:
    for k in range(depth + 1):
        if abs(subtree_fraction - 1 / (1 << k)) < 1e-12:
            return depth - k
    raise RegistryError("subtree fraction must be 1/2**k with k <= depth")


def hybrid_sync_plan(depth: int, subtree_fraction: float, leaf_index: int = 0) -> SyncPlan:
    level = _fraction_level(depth, subtree_fraction)
    if not 0 <= leaf_index < (1 << depth):
        raise RegistryError("leaf index outside the tree")
    sub_index = leaf_index >> level
    stored = (1 << (level + 1)) - 1
    fetched = [(lv, i) for lv in range(level, depth + 1) for i in range(1 << (depth - lv))
               if not (lv == level and i == sub_index) and not (lv > level and i == sub_index >> (lv - level))]
    return SyncPlan(depth, level, sub_index, stored, fetched)


class ClientRegistryState:
    """Local mirror of a registry, optionally restricted to one subtree."""

    def __init__(self, depth: int, version: int = 0, subtree: Optional[Tuple[int, int]] = None):
        self.tree = BitmapTree(depth)
        self.version = version
        self.subtree = subtree
        self.upper: Dict[int, Dict[int, int]] = {}
        self.upper_version: Optional[int] = None

    @property
    def depth(self) -> int:
        return self.tree.depth

    def covers(self, leaf_index: int) -> bool:
        if self.subtree is None:
            return True
        level, index = self.subtree
        return leaf_index >> level == index

    @classmethod
    def for_leaf(cls, depth: int, rid: int, subtree_fraction: float = 1.0) -> "ClientRegistryState":
        leaf, _ = locate(rid, depth)
        level = _fraction_level(depth, subtree_fraction)
        sub = None if level == depth else (level, leaf >> level)
        return cls(depth, 0, sub)

    def apply_deltas(self, deltas: List[StatusDelta]) -> "ClientRegistryState":
        expected = self.version + 1
        for d in deltas:
            if d.version != expected:
                raise SyncError(f"expected delta version {expected}, got {d.version}")
            expected += 1
        for d in deltas:
            for rid, st in d.changes:
                leaf, _ = locate(rid, self.depth)
                if self.covers(leaf):
                    self.tree.set_bit(rid, st == VALID)
            self.version = d.version
        return self

    def load_upper(self, nodes: Dict[int, Dict[int, int]], version: int):
        self.upper = {int(lv): {int(i): v for i, v in row.items()} for lv, row in nodes.items()}
        self.upper_version = version

    @property
    def root(self) -> int:
        if self.subtree is None:
            return self.tree.root
        return self.upper[self.depth][0]

    def stored_bytes(self) -> int:
        if self.subtree is None:
            return (2 * (1 << self.depth) - 1) * NODE_BYTES
        return (2 * (1 << self.subtree[0]) - 1) * NODE_BYTES

    def witness(self, rid: int) -> NonRevocationWitness:
        leaf, bit = locate(rid, self.depth)
        if not self.covers(leaf):
            raise RegistryError("leaf outside the locally stored subtree")
        value = self.tree.leaf(leaf)
        if not (value >> bit) & 1:
            raise RevokedError(f"credential with revocation id {rid} is revoked")
        full = self.tree.path(leaf)
        if self.subtree is None:
            return NonRevocationWitness(value, full, self.tree.root, self.version, rid)
        level, sub_index = self.subtree
        if self.upper_version != self.version:
            raise SyncError("upper nodes and local subtree are at different versions")
        if self.upper[level][sub_index] != self.tree.node(level, sub_index):
            raise SyncError("local subtree disagrees with the fetched upper nodes")
        siblings = list(full.siblings[:level])
        index = leaf >> level
        for lv in range(level, self.depth):
            siblings.append(self.upper[lv][index ^ 1])
            index >>= 1
        path = MerklePath(siblings, list(full.directions))
        return NonRevocationWitness(value, path, self.root, self.version, rid)


def apply_deltas(local: ClientRegistryState, deltas: List[StatusDelta]) -> ClientRegistryState:
    return local.apply_deltas(deltas)


def rebuild_root(depth: int, revoked_ids) -> int:
    """Brute-force oracle: dense leaf array from the revoked set, hashed level by level."""
    leaves = [FULL_LEAF] * (1 << depth)
    for rid in revoked_ids:
        leaf, bit = divmod(rid, BITS_PER_LEAF)
        leaves[leaf] &= ~(1 << bit)
    return merkle_root(leaves)
