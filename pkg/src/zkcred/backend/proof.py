"""Proof container and errors shared by the backends."""

import base64
from dataclasses import dataclass

from ..arith.field import from_hex, to_hex


class UnsatisfiedWitnessError(ValueError):
    def __init__(self, detail: dict):
        super().__init__(f"witness does not satisfy the circuit: {detail}")
        self.detail = detail


class DigestMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Proof:
    backend: str
    data: bytes
    public_inputs: tuple
    digest: int

    def to_json(self) -> dict:
        return {"backend": self.backend, "proof": base64.b64encode(self.data).decode(),
                "publicInputs": [to_hex(x) for x in self.public_inputs],
                "circuitDigest": to_hex(self.digest)}

    @classmethod
    def from_json(cls, doc: dict) -> "Proof":
        return cls(doc["backend"], base64.b64decode(doc["proof"], validate=True),
                   tuple(from_hex(x) for x in doc["publicInputs"]), from_hex(doc["circuitDigest"]))
