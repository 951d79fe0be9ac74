"""Credential data model and issuance.

A credential is a 16-leaf Poseidon Merkle tree: 8 metadata leaves on the
left, 8 content leaves on the right, root = H(meta_root, content_root).  The
issuer signs the root with EdDSA-Poseidon.

Metadata leaf order:

    0 revocation_id   1 schema_hash     2 binding_pk.x   3 binding_pk.y
    4 registry_ref    5 expiration_ts   6 delegatable    7 reserved (0)
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional

from ..arith.babyjub import Point
from ..arith.eddsa import Signature, SigningKeyPair, eddsa_sign, eddsa_verify
from ..arith.field import from_hex, to_hex
from ..encoding import EMPTY_LEAF, AttributeValue, EncodingError, encode
from ..arith.poseidon import hash2
from .merkle import merkle_prove, merkle_root
from .schema import Schema

META_SLOTS = 8
META_REVOCATION_ID = 0
META_SCHEMA_HASH = 1
META_BINDING_X = 2
META_BINDING_Y = 3
META_REGISTRY_REF = 4
META_EXPIRATION = 5
META_DELEGATABLE = 6
META_RESERVED = 7


class IssuanceError(ValueError):
    pass


class SchemaMismatchError(IssuanceError):
    pass


class CapacityError(IssuanceError):
    pass


@dataclass(frozen=True)
class MetaInputs:
    revocation_id: int
    registry_ref: int
    binding_pk: Point
    expiration_ts: int
    delegatable: bool = False


@dataclass(frozen=True)
class Credential:
    meta: List[int]
    content: List[int]
    signature: Signature
    issuer_pk: Point
    schema: Optional[Schema] = None
    raw_attributes: Dict[int, AttributeValue] = field(default_factory=dict)

    @cached_property
    def meta_root(self) -> int:
        return merkle_root(self.meta)

    @cached_property
    def content_root(self) -> int:
        return merkle_root(self.content)

    @cached_property
    def root(self) -> int:
        return hash2(self.meta_root, self.content_root)

    @property
    def revocation_id(self) -> int:
        return self.meta[META_REVOCATION_ID]

    @property
    def binding_pk(self) -> Point:
        return Point(self.meta[META_BINDING_X], self.meta[META_BINDING_Y])

    @property
    def expiration(self) -> int:
        return self.meta[META_EXPIRATION]

    @property
    def delegatable(self) -> bool:
        return self.meta[META_DELEGATABLE] == 1

    @property
    def schema_hash(self) -> int:
        return self.meta[META_SCHEMA_HASH]

    @property
    def registry_ref(self) -> int:
        return self.meta[META_REGISTRY_REF]

    @property
    def content_depth(self) -> int:
        return len(self.content).bit_length() - 1

    def leaves(self) -> List[int]:
        """All 16 leaves in tree order (meta first)."""
        return list(self.meta) + list(self.content)

    def content_path(self, position: int):
        """Path from content leaf `position` to the root, meta_root as the last sibling."""
        path = merkle_prove(self.content, position)
        return (path.siblings + [self.meta_root], path.directions + [1])

    def verify_signature(self) -> bool:
        return eddsa_verify(self.issuer_pk, self.root, self.signature)

    def check(self) -> bool:
        """Structural invariants plus signature."""
        return (len(self.meta) == META_SLOTS
                and self.meta[META_DELEGATABLE] in (0, 1)
                and self.meta[META_RESERVED] == 0
                and self.verify_signature())

    def to_json(self) -> dict:
        doc = {
            "meta": [to_hex(x) for x in self.meta],
            "content": [to_hex(x) for x in self.content],
            "signature": self.signature.to_json(),
            "issuerPk": self.issuer_pk.to_json(),
        }
        if self.schema is not None:
            doc["schema"] = self.schema.to_json()
        if self.raw_attributes:
            doc["raw_attributes"] = {str(k): {"kind": v.kind, "value": v.payload}
                                     for k, v in sorted(self.raw_attributes.items())}
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "Credential":
        schema = Schema.from_json(doc["schema"]) if isinstance(doc.get("schema"), dict) else None
        raw = {int(k): AttributeValue(v["kind"], v["value"])
               for k, v in doc.get("raw_attributes", {}).items()}
        return cls([from_hex(x) for x in doc["meta"]], [from_hex(x) for x in doc["content"]],
                   Signature.from_json(doc["signature"]), Point.from_json(doc["issuerPk"]),
                   schema, raw)


def build_meta(schema_hash: int, m: MetaInputs) -> List[int]:
    meta = [0] * META_SLOTS
    meta[META_REVOCATION_ID] = int(m.revocation_id)
    meta[META_SCHEMA_HASH] = schema_hash
    meta[META_BINDING_X] = m.binding_pk[0]
    meta[META_BINDING_Y] = m.binding_pk[1]
    meta[META_REGISTRY_REF] = int(m.registry_ref)
    meta[META_EXPIRATION] = int(m.expiration_ts)
    meta[META_DELEGATABLE] = int(bool(m.delegatable))
    return meta


def encode_attributes(schema: Schema, attributes) -> tuple:
    """Map attribute payloads onto content leaves.

    `attributes` is either a label -> payload dict or a list with one entry
    per schema attribute in position order.
    """
    if isinstance(attributes, dict):
        unknown = set(attributes) - {a.label for a in schema.attributes}
        if unknown:
            raise SchemaMismatchError(f"attributes not in schema: {sorted(unknown)}")
        missing = {a.label for a in schema.attributes} - set(attributes)
        if missing:
            raise SchemaMismatchError(f"missing attributes: {sorted(missing)}")
        items = [(a, attributes[a.label]) for a in schema.attributes]
    else:
        ordered = sorted(schema.attributes, key=lambda a: a.position)
        if len(attributes) != len(ordered):
            raise SchemaMismatchError(f"expected {len(ordered)} attributes, got {len(attributes)}")
        items = list(zip(ordered, attributes))

    content = [EMPTY_LEAF] * schema.content_slots
    raw = {}
    for desc, payload in items:
        value = payload if isinstance(payload, AttributeValue) else AttributeValue(desc.kind, payload)
        if value.kind != desc.kind:
            raise SchemaMismatchError(f"{desc.label!r} expects {desc.kind}, got {value.kind}")
        try:
            enc = encode(value)
        except EncodingError as e:
            raise SchemaMismatchError(f"{desc.label!r}: {e}") from e
        content[desc.position] = enc.leaf
        raw[desc.position] = value
    return content, raw


def issue(issuer: SigningKeyPair, schema: Schema, meta: MetaInputs, attributes,
          capacity: Optional[int] = None) -> Credential:
    if capacity is not None and not 0 <= meta.revocation_id < capacity:
        raise CapacityError(f"revocation id {meta.revocation_id} outside registry capacity {capacity}")
    if meta.expiration_ts < 0:
        raise IssuanceError("expiration must be a non-negative UNIX time")
    content, raw = encode_attributes(schema, attributes)
    meta_leaves = build_meta(schema.hash, meta)
    root = hash2(merkle_root(meta_leaves), merkle_root(content))
    sig = eddsa_sign(issuer, root)
    return Credential(meta_leaves, content, sig, issuer.public, schema, raw)

