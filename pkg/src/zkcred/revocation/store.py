"""On-disk persistence for a registry: periodic snapshots plus an append-only delta log.

Layout of a registry directory:

    descriptor.json          registry description document
    snapshot-<version>.json  non-default leaves at that version
    deltas.jsonl             one StatusDelta per line, never rewritten

Recovery loads the newest snapshot and replays the deltas after it.
"""

import json
import os
from pathlib import Path

from ..arith.field import from_hex, to_hex
from .registry import RegistryError, RevocationRegistry, StatusDelta


class RegistryStore:
    def __init__(self, directory, snapshot_every: int = 64):
        self.dir = Path(directory)
        self.snapshot_every = snapshot_every

    @property
    def log_path(self) -> Path:
        return self.dir / "deltas.jsonl"

    def exists(self) -> bool:
        return (self.dir / "descriptor.json").exists()

    def create(self, reg: RevocationRegistry, descriptor: dict):
        self.dir.mkdir(parents=True, exist_ok=True)
        if self.exists():
            raise RegistryError(f"registry already exists at {self.dir}")
        (self.dir / "descriptor.json").write_text(json.dumps(descriptor, indent=2, sort_keys=True))
        with open(self.log_path, "w") as f:
            for d in reg.delta_log:
                f.write(json.dumps(d.to_json()) + "\n")
        self.write_snapshot(reg)

    def descriptor(self) -> dict:
        return json.loads((self.dir / "descriptor.json").read_text())

    def write_snapshot(self, reg: RevocationRegistry):
        with reg._lock:
            doc = {"id": reg.registry_id, "depth": reg.depth, "version": reg.version,
                   "allowUnrevoke": reg.allow_unrevoke,
                   "leaves": {str(i): to_hex(v) for i, v in sorted(reg.tree.levels[0].items())},
                   "root": to_hex(reg.root)}
        path = self.dir / f"snapshot-{doc['version']}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc))
        os.replace(tmp, path)

    def append(self, reg: RevocationRegistry, delta: StatusDelta):
        with open(self.log_path, "a") as f:
            f.write(json.dumps(delta.to_json()) + "\n")
            f.flush()
            os.fsync(f.fileno())
        if delta.version % self.snapshot_every == 0:
            self.write_snapshot(reg)

    def read_log(self):
        deltas = []
        with open(self.log_path) as f:
            for line in f:
                line = line.strip()
                if line:
                    deltas.append(StatusDelta.from_json(json.loads(line)))
        return deltas

    def latest_snapshot(self) -> dict:
        snaps = sorted(self.dir.glob("snapshot-*.json"), key=lambda p: int(p.stem.split("-")[1]))
        if not snaps:
            raise RegistryError(f"no snapshot in {self.dir}")
        return json.loads(snaps[-1].read_text())

    def load(self) -> RevocationRegistry:
        snap = self.latest_snapshot()
        reg = RevocationRegistry(snap["depth"], snap["id"], snap["allowUnrevoke"])
        for i, v in snap["leaves"].items():
            reg.tree.set_leaf(int(i), from_hex(v))
        if reg.root != from_hex(snap["root"]):
            raise RegistryError("snapshot root does not match its leaves")
        log = self.read_log()
        reg.version = snap["version"]
        # the log is complete, so the versions before the snapshot are kept too
        reg.delta_log = [d for d in log if d.version <= reg.version]
        if len(reg.delta_log) != reg.version:
            raise RegistryError("delta log is shorter than the snapshot version")
        reg.root_history = [reg.root_history[0]] + [d.root for d in reg.delta_log]
        if reg.root_history[-1] != reg.root:
            raise RegistryError("snapshot root disagrees with the logged root of its version")
        for d in log[reg.version:]:
            if d.version != reg.version + 1:
                raise RegistryError(f"delta log gap at version {d.version}")
            for rid, st in d.changes:
                reg.tree.set_bit(rid, st == "valid")
            reg.version = d.version
            reg.delta_log.append(d)
            reg.root_history.append(reg.root)
        return reg
