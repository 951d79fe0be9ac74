"""The verifiable presentation document."""

import base64
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..arith.field import from_hex, to_hex
from ..backend import Proof
from ..circuits.scenarios import ScenarioSpec, name
from ..encoding import AttributeValue

JSON_SCALARS = (str, int, float, bool)


@dataclass(frozen=True)
class Disclosure:
    """One revealed attribute: the leaf is authoritative, the rest is for display.

    `value` is the raw attribute; it is mandatory for long strings, whose leaf
    is a hash.
    """
    cred: int
    position: int
    leaf: int
    label: Optional[str] = None
    kind: Optional[str] = None
    value: object = None

    def raw(self) -> Optional[AttributeValue]:
        if self.value is None or self.kind is None:
            return None
        return AttributeValue(self.kind, self.value)

    def to_json(self) -> dict:
        doc = {"cred": self.cred, "position": self.position, "leaf": to_hex(self.leaf)}
        for k in ("label", "kind", "value"):
            if getattr(self, k) is not None:
                doc[k] = getattr(self, k)
        return doc

    @classmethod
    def from_json(cls, d: dict) -> "Disclosure":
        return cls(int(d["cred"]), int(d["position"]), from_hex(d["leaf"]),
                   d.get("label"), d.get("kind"), d.get("value"))


@dataclass
class VerifiablePresentation:
    request_id: str
    spec: ScenarioSpec
    backend: str
    digest: int
    proof: bytes
    publics: Dict[str, int]
    disclosures: List[Disclosure] = field(default_factory=list)

    def proof_object(self, public_names) -> Proof:
        return Proof(self.backend, self.proof, tuple(self.publics[n] for n in public_names), self.digest)

    def leaf(self, cred: int, position: int) -> int:
        return self.publics[name(self.spec.slot_of(cred), f"leaf[{position}]")]

    def output(self, key: str) -> Optional[int]:
        return self.publics.get(key)

    def to_json(self) -> dict:
        return {
            "type": "VerifiablePresentation",
            "requestId": self.request_id,
            "backend": self.backend,
            "spec": self.spec.to_json(),
            "circuitDigest": to_hex(self.digest),
            "proof": base64.b64encode(self.proof).decode(),
            "publicInputs": {k: to_hex(v) for k, v in self.publics.items()},
            "disclosures": [d.to_json() for d in self.disclosures],
        }

    @classmethod
    def from_json(cls, d: dict) -> "VerifiablePresentation":
        if d.get("type", "VerifiablePresentation") != "VerifiablePresentation":
            raise ValueError("not a verifiable presentation")
        return cls(str(d["requestId"]), ScenarioSpec.from_json(d["spec"]), d["backend"],
                   from_hex(d["circuitDigest"]), base64.b64decode(d["proof"], validate=True),
                   {k: from_hex(v) for k, v in d["publicInputs"].items()},
                   [Disclosure.from_json(x) for x in d.get("disclosures", [])])
