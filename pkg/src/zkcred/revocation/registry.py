"""Merkle-bitmap revocation registry.

Each leaf packs 252 status bits (1 = valid, 0 = revoked), so a depth-n tree
covers 2**n * 252 revocation ids.  Id i lives in leaf i // 252 at bit i % 252.
Every bit starts at 1, which makes the initial tree uniform per level; nodes
equal to that per-level default are not stored, so even depth 24 is cheap.
"""

import threading
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..arith.field import from_hex, to_hex
from ..arith.poseidon import hash2
from ..credential.merkle import MerklePath, merkle_verify

BITS_PER_LEAF = 252
MIN_DEPTH, MAX_DEPTH = 1, 24
FULL_LEAF = (1 << BITS_PER_LEAF) - 1
NODE_BYTES = 32

REVOKED, VALID = "revoked", "valid"


class RegistryError(ValueError):
    pass


class CapacityError(RegistryError):
    pass


class RevokedError(RegistryError):
    """The requested id is revoked, so no non-revocation witness exists."""


class SyncError(RegistryError):
    pass


def capacity(depth: int) -> int:
    return (1 << depth) * BITS_PER_LEAF


def locate(rid: int, depth: Optional[int] = None) -> Tuple[int, int]:
    if rid < 0 or (depth is not None and rid >= capacity(depth)):
        raise CapacityError(f"revocation id {rid} outside capacity")
    return divmod(rid, BITS_PER_LEAF)


def _check_depth(depth: int):
    if not MIN_DEPTH <= depth <= MAX_DEPTH:
        raise RegistryError(f"registry depth must be in {MIN_DEPTH}..{MAX_DEPTH}, got {depth}")


def default_nodes(depth: int) -> List[int]:
    """Node value of an untouched subtree at each level, leaves first."""
    out = [FULL_LEAF]
    for _ in range(depth):
        out.append(hash2(out[-1], out[-1]))
    return out


_DEFAULTS = default_nodes(MAX_DEPTH)


@dataclass(frozen=True)
class StatusDelta:
    version: int
    changes: List[Tuple[int, str]]
    # resulting root and publication time, so clients can check and date each version
    root: Optional[int] = None
    timestamp: Optional[int] = None

    def to_json(self) -> dict:
        d = {"version": self.version,
             "changes": [{"id": rid, "status": st} for rid, st in self.changes]}
        if self.root is not None:
            d["root"] = to_hex(self.root)
        if self.timestamp is not None:
            d["timestamp"] = self.timestamp
        return d

    @classmethod
    def from_json(cls, d: dict) -> "StatusDelta":
        root = from_hex(d["root"]) if "root" in d else None
        return cls(int(d["version"]), [(int(c["id"]), c["status"]) for c in d["changes"]],
                   root, d.get("timestamp"))


@dataclass(frozen=True)
class NonRevocationWitness:
    leaf_value: int
    path: MerklePath
    root: int
    version: int
    revocation_id: int

    @property
    def leaf_index(self) -> int:
        return self.revocation_id // BITS_PER_LEAF

    @property
    def bit_index(self) -> int:
        return self.revocation_id % BITS_PER_LEAF

    def verify(self, root: Optional[int] = None) -> bool:
        root = self.root if root is None else root
        return (merkle_verify(self.leaf_value, self.leaf_index, self.path, root)
                and (self.leaf_value >> self.bit_index) & 1 == 1)


class BitmapTree:
    """Sparse Merkle tree over packed status leaves."""

    def __init__(self, depth: int):
        _check_depth(depth)
        self.depth = depth
        # levels[0] holds leaves; only non-default nodes are present
        self.levels: List[Dict[int, int]] = [dict() for _ in range(depth + 1)]

    def node(self, level: int, index: int) -> int:
        return self.levels[level].get(index, _DEFAULTS[level])

    @property
    def root(self) -> int:
        return self.node(self.depth, 0)

    def leaf(self, index: int) -> int:
        return self.node(0, index)

    def status(self, rid: int) -> bool:
        leaf, bit = locate(rid, self.depth)
        return (self.leaf(leaf) >> bit) & 1 == 1

    def _set_node(self, level: int, index: int, value: int):
        if value == _DEFAULTS[level]:
            self.levels[level].pop(index, None)
        else:
            self.levels[level][index] = value

    def set_leaf(self, index: int, value: int):
        self._set_node(0, index, value)
        for level in range(self.depth):
            index >>= 1
            left = self.node(level, 2 * index)
            right = self.node(level, 2 * index + 1)
            self._set_node(level + 1, index, hash2(left, right))

    def set_bit(self, rid: int, valid: bool) -> bool:
        """Return True if the bit changed."""
        leaf, bit = locate(rid, self.depth)
        old = self.leaf(leaf)
        new = old | (1 << bit) if valid else old & ~(1 << bit)
        if new == old:
            return False
        self.set_leaf(leaf, new)
        return True

    def path(self, leaf_index: int) -> MerklePath:
        siblings, directions = [], []
        index = leaf_index
        for level in range(self.depth):
            siblings.append(self.node(level, index ^ 1))
            directions.append(index & 1)
            index >>= 1
        return MerklePath(siblings, directions)

    def copy(self) -> "BitmapTree":
        t = BitmapTree(self.depth)
        t.levels = [dict(lv) for lv in self.levels]
        return t

    def dense_bytes(self) -> bytes:
        """Every node of the tree, leaves first, 32 bytes each (the uncompressed form)."""
        out = bytearray()
        for level in range(self.depth + 1):
            default = _DEFAULTS[level].to_bytes(NODE_BYTES, "little")
            stored = self.levels[level]
            for i in range(1 << (self.depth - level)):
                v = stored.get(i)
                out += default if v is None else v.to_bytes(NODE_BYTES, "little")
        return bytes(out)

    @classmethod
    def from_dense_bytes(cls, depth: int, data: bytes) -> "BitmapTree":
        expected = ((1 << (depth + 1)) - 1) * NODE_BYTES
        if len(data) != expected:
            raise RegistryError(f"dense tree of depth {depth} needs {expected} bytes, got {len(data)}")
        t = cls(depth)
        pos = 0
        for level in range(depth + 1):
            for i in range(1 << (depth - level)):
                v = int.from_bytes(data[pos:pos + NODE_BYTES], "little")
                pos += NODE_BYTES
                if v != _DEFAULTS[level]:
                    t.levels[level][i] = v
        if t.rebuild_root() != t.root:
            raise RegistryError("dense tree is internally inconsistent")
        return t

    def rebuild_root(self) -> int:
        """Recompute the root from the stored leaves only."""
        nodes = dict(self.levels[0])
        for level in range(self.depth):
            parents = {}
            for i in {k >> 1 for k in nodes}:
                left = nodes.get(2 * i, _DEFAULTS[level])
                right = nodes.get(2 * i + 1, _DEFAULTS[level])
                parents[i] = hash2(left, right)
            nodes = parents
        return nodes.get(0, _DEFAULTS[self.depth])


class RevocationRegistry:
    """Issuer-side registry: tree, version counter, append-only delta log.

    Mutations are serialized by a lock; readers get (root, version) pairs
    through snapshot() which holds the same lock.
    """

    def __init__(self, depth: int, registry_id: str = "registry", allow_unrevoke: bool = True):
        self.tree = BitmapTree(depth)
        self.registry_id = registry_id
        self.allow_unrevoke = allow_unrevoke
        self.version = 0
        self.delta_log: List[StatusDelta] = []
        # root after each version; index = version
        self.root_history: List[int] = [self.tree.root]
        self._lock = threading.RLock()

    @property
    def depth(self) -> int:
        return self.tree.depth

    @property
    def capacity(self) -> int:
        return capacity(self.depth)

    @property
    def root(self) -> int:
        return self.tree.root

    def snapshot(self) -> Tuple[int, int]:
        with self._lock:
            return self.tree.root, self.version

    def status(self, rid: int) -> bool:
        return self.tree.status(rid)

    def set_statuses(self, changes, timestamp: Optional[int] = None) -> StatusDelta:
        changes = [(int(rid), st) for rid, st in changes]
        for rid, st in changes:
            if st not in (REVOKED, VALID):
                raise RegistryError(f"unknown status {st!r}")
            locate(rid, self.depth)
            if st == VALID and not self.allow_unrevoke and not self.tree.status(rid):
                raise RegistryError("registry policy forbids un-revocation")
        with self._lock:
            for rid, st in changes:
                self.tree.set_bit(rid, st == VALID)
            self.version += 1
            ts = int(time.time()) if timestamp is None else int(timestamp)
            delta = StatusDelta(self.version, changes, self.tree.root, ts)
            self.delta_log.append(delta)
            self.root_history.append(self.tree.root)
            return delta

    def version_of(self, root: int) -> Optional[int]:
        """Latest version whose root equals `root`, or None."""
        for v in range(len(self.root_history) - 1, -1, -1):
            if self.root_history[v] == root:
                return v
        return None

    def superseded_at(self, version: int) -> Optional[int]:
        """Publication time of the version that replaced `version`."""
        if version >= self.version:
            return None
        return self.delta_log[version].timestamp

    def set_status(self, rid: int, status: str, timestamp: Optional[int] = None) -> StatusDelta:
        return self.set_statuses([(rid, status)], timestamp)

    def revoke(self, rid: int, timestamp: Optional[int] = None) -> StatusDelta:
        return self.set_status(rid, REVOKED, timestamp)

    def deltas_since(self, version: int) -> List[StatusDelta]:
        if not 0 <= version <= self.version:
            raise SyncError(f"unknown version {version}")
        with self._lock:
            return list(self.delta_log[version:])

    def witness(self, rid: int) -> NonRevocationWitness:
        with self._lock:
            leaf, bit = locate(rid, self.depth)
            value = self.tree.leaf(leaf)
            if not (value >> bit) & 1:
                raise RevokedError(f"credential with revocation id {rid} is revoked")
            return NonRevocationWitness(value, self.tree.path(leaf), self.tree.root, self.version, rid)

    def upper_nodes(self, max_level: int) -> Dict[int, Dict[int, int]]:
        """All nodes at levels >= max_level (counted from the leaves)."""
        if not 0 <= max_level <= self.depth:
            raise RegistryError("level out of range")
        with self._lock:
            return {lv: {i: self.tree.node(lv, i) for i in range(1 << (self.depth - lv))}
                    for lv in range(max_level, self.depth + 1)}

    def descriptor(self, issuer_pk=None, endpoint: str = "") -> dict:
        doc = {"id": self.registry_id, "depth": self.depth, "bitsPerLeaf": BITS_PER_LEAF,
               "policy": {"unrevoke": self.allow_unrevoke}, "endpoint": endpoint}
        if issuer_pk is not None:
            doc["issuer"] = issuer_pk.to_json()
        return doc

    def root_json(self) -> dict:
        root, version = self.snapshot()
        return {"root": to_hex(root), "version": version, "depth": self.depth}


def new_registry(depth: int, registry_id: str = "registry", allow_unrevoke: bool = True) -> RevocationRegistry:
    return RevocationRegistry(depth, registry_id, allow_unrevoke)


def set_status(reg: RevocationRegistry, rid: int, status: str) -> StatusDelta:
    return reg.set_status(rid, status)


def witness(reg: RevocationRegistry, rid: int) -> NonRevocationWitness:
    return reg.witness(rid)


def witness_to_json(w: NonRevocationWitness) -> dict:
    return {"leaf": to_hex(w.leaf_value), "siblings": [to_hex(s) for s in w.path.siblings],
            "root": to_hex(w.root), "version": w.version, "id": w.revocation_id}


def witness_from_json(d: dict) -> NonRevocationWitness:
    rid = int(d["id"])
    sibs = [from_hex(s) for s in d["siblings"]]
    leaf_index = rid // BITS_PER_LEAF
    dirs = [(leaf_index >> i) & 1 for i in range(len(sibs))]
    return NonRevocationWitness(from_hex(d["leaf"]), MerklePath(sibs, dirs), from_hex(d["root"]),
                                int(d["version"]), rid)
