"""Proof requests sent by a verifier to a holder."""

import dataclasses
import secrets
import time
import uuid
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from ..arith.babyjub import Point
from ..arith.field import P, from_hex, to_hex
from ..circuits.scenarios import SCENARIOS, Predicate, ScenarioSpec

DEFAULT_MAX_AGE = 24 * 3600


@dataclass(frozen=True)
class RequestedCredential:
    schema: int                      # schema hash
    reveal: Sequence[int] = ()       # content positions

    def to_json(self) -> dict:
        return {"schema": to_hex(self.schema), "reveal": list(self.reveal)}

    @classmethod
    def from_json(cls, d: dict) -> "RequestedCredential":
        return cls(from_hex(d["schema"]), tuple(int(p) for p in d.get("reveal", ())))


@dataclass(frozen=True)
class RegistryRequirement:
    ref: int
    min_version: int = 0

    def to_json(self) -> dict:
        return {"ref": to_hex(self.ref), "minVersion": self.min_version}

    @classmethod
    def from_json(cls, d: dict) -> "RegistryRequirement":
        return cls(from_hex(d["ref"]), int(d.get("minVersion", 0)))


@dataclass(frozen=True)
class DesignatedVerifier:
    encryption_pk: Point
    signing_pk: Point

    def to_json(self) -> dict:
        return {"encryptionPk": self.encryption_pk.to_json(), "signingPk": self.signing_pk.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "DesignatedVerifier":
        return cls(Point.from_json(d["encryptionPk"]), Point.from_json(d["signingPk"]))


@dataclass(frozen=True)
class ProofRequest:
    request_id: str
    challenge: int
    timestamp: int
    credentials: List[RequestedCredential]
    predicates: List[dict] = field(default_factory=list)
    trusted_issuers: List[Point] = field(default_factory=list)
    registries: List[RegistryRequirement] = field(default_factory=list)
    max_age: int = DEFAULT_MAX_AGE
    chain: int = 1
    designated_verifier: Optional[DesignatedVerifier] = None
    binding_commitment: bool = False

    def to_json(self) -> dict:
        return {
            "type": "ProofRequest",
            "id": self.request_id,
            "challenge": to_hex(self.challenge),
            "timestamp": self.timestamp,
            "credentials": [c.to_json() for c in self.credentials],
            "predicates": list(self.predicates),
            "trustedIssuers": [p.to_json() for p in self.trusted_issuers],
            "registries": [r.to_json() for r in self.registries],
            "maxAge": self.max_age,
            "chain": self.chain,
            "designatedVerifier": self.designated_verifier.to_json() if self.designated_verifier else None,
            "bindingCommitment": self.binding_commitment,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ProofRequest":
        if d.get("type", "ProofRequest") != "ProofRequest":
            raise ValueError("not a proof request")
        dv = d.get("designatedVerifier")
        return cls(
            str(d["id"]), from_hex(d["challenge"]), int(d["timestamp"]),
            [RequestedCredential.from_json(c) for c in d["credentials"]],
            [Predicate.from_json(p).to_json() for p in d.get("predicates", [])],
            [Point.from_json(p) for p in d.get("trustedIssuers", [])],
            [RegistryRequirement.from_json(r) for r in d.get("registries", [])],
            int(d.get("maxAge", DEFAULT_MAX_AGE)), int(d.get("chain", 1)),
            DesignatedVerifier.from_json(dv) if dv else None,
            bool(d.get("bindingCommitment", False)),
        )

    def min_version(self, ref: int) -> int:
        for r in self.registries:
            if r.ref == ref:
                return r.min_version
        return 0

    def accepts_registry(self, ref: int) -> bool:
        return not self.registries or any(r.ref == ref for r in self.registries)

    def trusts(self, issuer_pk) -> bool:
        return not self.trusted_issuers or tuple(issuer_pk) in {tuple(p) for p in self.trusted_issuers}

    def spec(self, depth: int) -> ScenarioSpec:
        revealed = tuple((k, p) for k, c in enumerate(self.credentials) for p in c.reveal)
        spec = ScenarioSpec("custom", revealed, depth, self.chain, len(self.credentials),
                            tuple(self.predicates), self.designated_verifier is not None,
                            self.binding_commitment)
        return canonical_spec(spec)


def canonical_spec(spec: ScenarioSpec) -> ScenarioSpec:
    """Swap in the preset of the same shape, so keys and names are shared."""
    for preset in SCENARIOS.values():
        if dataclasses.replace(spec, name=preset.name) == preset:
            return preset
    return dataclasses.replace(spec, name="custom") if spec.name in SCENARIOS else spec


def new_request(credentials: Sequence[RequestedCredential], *, predicates=(), trusted_issuers=(),
                registries=(), max_age: int = DEFAULT_MAX_AGE, chain: int = 1,
                designated_verifier: Optional[DesignatedVerifier] = None,
                binding_commitment: bool = False, timestamp: Optional[int] = None,
                challenge: Optional[int] = None) -> ProofRequest:
    """A request with a fresh random challenge and the current time."""
    return ProofRequest(
        str(uuid.uuid4()),
        secrets.randbelow(P) if challenge is None else challenge % P,
        int(time.time()) if timestamp is None else int(timestamp),
        list(credentials),
        [Predicate.from_json(p).to_json() for p in predicates],
        list(trusted_issuers),
        [r if isinstance(r, RegistryRequirement) else RegistryRequirement(int(r)) for r in registries],
        max_age, chain, designated_verifier, binding_commitment,
    )
