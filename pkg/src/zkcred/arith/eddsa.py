"""EdDSA over Baby Jubjub with Poseidon as the challenge hash (circomlib variant).

Messages are single field elements.  Nonces are derived deterministically
from the secret seed and the message, so signing is reproducible.
"""

from dataclasses import dataclass

from . import babyjub
from .babyjub import BASE8, SUBORDER, Point, is_on_curve, point_add, scalar_mul
from .blake512 import blake512
from .field import P, to_bytes
from .poseidon import poseidon_hash


class InvalidKeyError(ValueError):
    """Raised for public keys that are not points of the curve."""


@dataclass(frozen=True)
class Signature:
    R: Point
    S: int

    def to_json(self) -> dict:
        return {"Rx": to_bytes(self.R.x).hex(), "Ry": to_bytes(self.R.y).hex(),
                "S": self.S.to_bytes(32, "little").hex()}

    @classmethod
    def from_json(cls, d: dict) -> "Signature":
        R = Point.from_json({"x": d["Rx"], "y": d["Ry"]})
        return cls(R, int.from_bytes(bytes.fromhex(d["S"]), "little"))


@dataclass(frozen=True, repr=False)
class SigningKeyPair:
    secret: bytes
    public: Point

    def __repr__(self):
        # never print the seed
        return f"SigningKeyPair(public={self.public})"


def _prune(buf: bytes) -> bytes:
    b = bytearray(buf[:32])
    b[0] &= 0xF8
    b[31] &= 0x7F
    b[31] |= 0x40
    return bytes(b)


def _secret_scalar(seed: bytes):
    h = blake512(seed)
    return int.from_bytes(_prune(h), "little"), h[32:]


def eddsa_keygen(seed: bytes) -> SigningKeyPair:
    if len(seed) != 32:
        raise ValueError("seed must be 32 bytes")
    s, _ = _secret_scalar(seed)
    return SigningKeyPair(bytes(seed), scalar_mul(s >> 3, BASE8))


def challenge_hash(R, A, msg: int) -> int:
    return poseidon_hash([R[0], R[1], A[0], A[1], msg])


def eddsa_sign(kp: SigningKeyPair, msg: int) -> Signature:
    msg = int(msg) % P
    s, nonce_key = _secret_scalar(kp.secret)
    r = int.from_bytes(blake512(nonce_key + msg.to_bytes(32, "little")), "little") % SUBORDER
    R = scalar_mul(r, BASE8)
    h = challenge_hash(R, kp.public, msg)
    return Signature(R, (r + h * s) % SUBORDER)


def eddsa_verify(pk, msg: int, sig: Signature) -> bool:
    if not is_on_curve(pk):
        raise InvalidKeyError("public key is not on the curve")
    R, S = sig.R, sig.S
    if not is_on_curve(R) or not 0 <= S < SUBORDER or not 0 <= int(msg) < P:
        return False
    h = challenge_hash(R, pk, int(msg))
    left = scalar_mul(S, BASE8)
    right = point_add(R, scalar_mul(8 * h, pk))
    return left == right


def ecdh(secret_seed: bytes, peer_pk) -> Point:
    """Diffie-Hellman on the prime-order subgroup using the EdDSA secret scalar."""
    if not babyjub.in_subgroup(peer_pk):
        raise InvalidKeyError("peer key outside the prime-order subgroup")
    s, _ = _secret_scalar(secret_seed)
    return scalar_mul(s >> 3, peer_pk)
