"""Verifier trust configuration and registry history views.

A policy file looks like

    {"trustedIssuers": [{"x": ..., "y": ...}],
     "registries": [{"descriptor": {...}}],
     "maxAge": 86400, "maxVersionLag": 1, "requestTtl": 600, "backend": "groth16"}

A registry root is fresh when it is the current root, or when it is at most
maxVersionLag versions behind and was superseded no more than maxAge seconds
before the request time.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..arith.babyjub import Point
from ..credential.schema import registry_ref_hash
from ..revocation import BitmapTree, RegistryClient, RegistryStore, RevocationRegistry
from .request import DEFAULT_MAX_AGE


@dataclass
class RegistryView:
    """Root per version and the publication time of each version."""
    registry_id: str
    depth: int
    roots: List[int]
    published: List[Optional[int]]

    @property
    def version(self) -> int:
        return len(self.roots) - 1

    @property
    def root(self) -> int:
        return self.roots[-1]

    @classmethod
    def from_registry(cls, reg: RevocationRegistry) -> "RegistryView":
        return cls(reg.registry_id, reg.depth, list(reg.root_history),
                   [None] + [d.timestamp for d in reg.delta_log])

    @classmethod
    def from_deltas(cls, registry_id: str, depth: int, deltas) -> "RegistryView":
        return cls(registry_id, depth, [BitmapTree(depth).root] + [d.root for d in deltas],
                   [None] + [d.timestamp for d in deltas])

    def version_of(self, root: int) -> Optional[int]:
        for v in range(self.version, -1, -1):
            if self.roots[v] == root:
                return v
        return None

    def freshness(self, root: int, now: int, max_age: int, max_lag: int) -> Tuple[bool, str]:
        v = self.version_of(root)
        if v is None:
            return False, "root not in the registry history"
        if v == self.version:
            return True, f"current root (version {v})"
        lag = self.version - v
        superseded = self.published[v + 1]
        if lag > max_lag:
            return False, f"root is {lag} versions old"
        if superseded is None or now - superseded > max_age:
            return False, f"root superseded more than {max_age} s before the request"
        return True, f"version {v}, superseded {now - superseded} s before the request"


def open_registry(descriptor: dict):
    """(RevocationRegistry, None) for a directory endpoint, (None, client) for HTTP."""
    endpoint = descriptor.get("endpoint", "")
    if endpoint.startswith(("http://", "https://")):
        return None, RegistryClient.http(endpoint)
    path = endpoint[len("file://"):] if endpoint.startswith("file://") else endpoint
    if not path:
        raise ValueError(f"registry {descriptor.get('id')!r} has no endpoint")
    return RegistryStore(path).load(), None


def fetch_view(descriptor: dict) -> RegistryView:
    reg, client = open_registry(descriptor)
    if reg is not None:
        return RegistryView.from_registry(reg)
    return RegistryView.from_deltas(descriptor["id"], int(descriptor["depth"]),
                                    client.deltas(descriptor["id"], 0))


@dataclass
class VerifierPolicy:
    trusted_issuers: List[Point] = field(default_factory=list)
    registries: Dict[int, dict] = field(default_factory=dict)     # ref -> descriptor
    max_age: int = DEFAULT_MAX_AGE
    max_version_lag: int = 1
    request_ttl: int = 600
    backend: str = "groth16"
    views: Dict[int, RegistryView] = field(default_factory=dict)
    # in-process registries, read live on every check
    live: Dict[int, RevocationRegistry] = field(default_factory=dict)

    def add_registry(self, descriptor: dict, source=None) -> int:
        """Accept a registry; `source` is a RegistryView or a live RevocationRegistry."""
        ref = registry_ref_hash(descriptor)
        self.registries[ref] = descriptor
        if isinstance(source, RevocationRegistry):
            self.live[ref] = source
        elif source is not None:
            self.views[ref] = source
        return ref

    def view(self, ref: int) -> Optional[RegistryView]:
        """History for a registry; remote ones are fetched on first use and cached."""
        if ref in self.live:
            return RegistryView.from_registry(self.live[ref])
        if ref not in self.views and ref in self.registries:
            self.views[ref] = fetch_view(self.registries[ref])
        return self.views.get(ref)

    def refresh(self):
        self.views.clear()

    def trusts(self, issuer_pk) -> bool:
        return tuple(issuer_pk) in {tuple(p) for p in self.trusted_issuers}

    def to_json(self) -> dict:
        return {"trustedIssuers": [p.to_json() for p in self.trusted_issuers],
                "registries": [{"descriptor": d} for d in self.registries.values()],
                "maxAge": self.max_age, "maxVersionLag": self.max_version_lag,
                "requestTtl": self.request_ttl, "backend": self.backend}

    @classmethod
    def from_json(cls, doc: dict) -> "VerifierPolicy":
        pol = cls([Point.from_json(p) for p in doc.get("trustedIssuers", [])],
                  max_age=int(doc.get("maxAge", DEFAULT_MAX_AGE)),
                  max_version_lag=int(doc.get("maxVersionLag", 1)),
                  request_ttl=int(doc.get("requestTtl", 600)), backend=doc.get("backend", "groth16"))
        for r in doc.get("registries", []):
            pol.add_registry(r["descriptor"])
        return pol

    @classmethod
    def load(cls, path) -> "VerifierPolicy":
        return cls.from_json(json.loads(Path(path).read_text()))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2))
