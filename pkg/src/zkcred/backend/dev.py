"""Transparent development backend.

Proving re-evaluates the circuit and emits a token binding the circuit
digest to the public inputs.  Anyone can compute such a token, so this
backend is neither sound against a cheating prover nor zero-knowledge in
any cryptographic sense; it exists so protocol logic can be run and
differentially tested against the Groth16 backend quickly.
"""

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

from ..arith.field import P, to_bytes
from ..circuits.r1cs import ConstraintSystem, Witness
from .proof import DigestMismatchError, Proof, UnsatisfiedWitnessError

BACKEND_ID = "dev"


@dataclass(frozen=True)
class DevKey:
    digest: int
    num_public: int
    backend: str = BACKEND_ID


def _token(digest: int, publics: Sequence[int]) -> bytes:
    h = hashlib.sha256(b"zkcred-dev-proof")
    h.update(to_bytes(digest))
    for x in publics:
        h.update(to_bytes(int(x)))
    return h.digest()


def setup(cs: ConstraintSystem, rng=None):
    key = DevKey(cs.digest(), len(cs.public_vars))
    return key, key


def prove(pk: DevKey, cs: ConstraintSystem, witness, rng=None, force: bool = False) -> Proof:
    if pk.digest != cs.digest():
        raise DigestMismatchError("key belongs to a different circuit")
    w = witness.values if isinstance(witness, Witness) else list(witness)
    if len(w) != cs.num_vars:
        raise ValueError("witness length does not match the circuit")
    publics = tuple(w[i] for i in cs.public_vars)
    if not force:
        bad = cs.violations(w, limit=1)
        if bad:
            raise UnsatisfiedWitnessError(cs.describe(bad[0]))
        return Proof(BACKEND_ID, _token(pk.digest, publics), publics, pk.digest)
    # a forced proof over an unsatisfied witness carries no valid token
    return Proof(BACKEND_ID, bytes(32), publics, pk.digest)


def verify(vk: DevKey, proof: Proof, public_inputs: Optional[Sequence[int]] = None) -> bool:
    publics = list(proof.public_inputs if public_inputs is None else public_inputs)
    if proof.backend != BACKEND_ID or proof.digest != vk.digest or len(publics) != vk.num_public:
        return False
    if any(not 0 <= int(x) < P for x in publics):
        return False
    return proof.data == _token(vk.digest, publics)


def key_to_bytes(key: DevKey) -> bytes:
    return f"{BACKEND_ID}:{key.digest:x}:{key.num_public}".encode()


def key_from_bytes(data: bytes) -> DevKey:
    tag, digest, n = data.decode().split(":")
    if tag != BACKEND_ID:
        raise ValueError("not a dev key")
    return DevKey(int(digest, 16), int(n))


pk_to_bytes = vk_to_bytes = key_to_bytes
pk_from_bytes = vk_from_bytes = key_from_bytes
