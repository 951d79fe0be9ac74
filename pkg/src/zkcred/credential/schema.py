"""Credential schemas and other hash-referenced documents."""

import json
from dataclasses import dataclass, field
from typing import List

from ..encoding import KINDS, encode_long_string


def canonical_json(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def document_hash(doc) -> int:
    return encode_long_string(canonical_json(doc))


def registry_ref_hash(descriptor: dict) -> int:
    """Reference stored in a credential's registry_ref meta leaf."""
    return document_hash(descriptor)


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeDescriptor:
    position: int
    label: str
    kind: str
    note: str = ""

    def to_json(self) -> dict:
        return {"position": self.position, "label": self.label, "kind": self.kind, "note": self.note}


@dataclass(frozen=True)
class Schema:
    name: str
    attributes: List[AttributeDescriptor]
    content_slots: int = 8
    hash: int = field(init=False, compare=False)

    def __post_init__(self):
        n = self.content_slots
        if n < 2 or n > 32 or n & (n - 1):
            raise SchemaError("content slots must be a power of two between 2 and 32")
        positions = [a.position for a in self.attributes]
        if len(set(positions)) != len(positions):
            raise SchemaError("duplicate attribute positions")
        if any(not 0 <= p < self.content_slots for p in positions):
            raise SchemaError(f"positions must lie in 0..{self.content_slots - 1}")
        labels = [a.label for a in self.attributes]
        if len(set(labels)) != len(labels):
            raise SchemaError("duplicate attribute labels")
        for a in self.attributes:
            if a.kind not in KINDS:
                raise SchemaError(f"unknown kind {a.kind!r} for {a.label!r}")
        object.__setattr__(self, "hash", document_hash(self.to_json()))

    def to_json(self) -> dict:
        doc = {"name": self.name,
               "attributes": [a.to_json() for a in sorted(self.attributes, key=lambda a: a.position)]}
        if self.content_slots != 8:
            doc["contentSlots"] = self.content_slots
        return doc

    def canonical_bytes(self) -> bytes:
        return canonical_json(self.to_json())

    @classmethod
    def from_json(cls, doc: dict) -> "Schema":
        attrs = [AttributeDescriptor(a["position"], a["label"], a["kind"], a.get("note", ""))
                 for a in doc["attributes"]]
        return cls(doc["name"], attrs, doc.get("contentSlots", 8))

    def by_label(self, label: str) -> AttributeDescriptor:
        for a in self.attributes:
            if a.label == label:
                return a
        raise SchemaError(f"schema {self.name!r} has no attribute {label!r}")

    def by_position(self, pos: int) -> AttributeDescriptor:
        for a in self.attributes:
            if a.position == pos:
                return a
        raise SchemaError(f"schema {self.name!r} has no attribute at position {pos}")
