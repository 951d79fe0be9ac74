from .field import P, FieldElement, FieldError, fe, inv, to_bytes, from_bytes, to_hex, from_hex
from .babyjub import (
    A, D, ORDER, SUBORDER, BASE8, GENERATOR, IDENTITY, Point,
    is_on_curve, point_add, scalar_mul, negate, in_subgroup,
)
from .poseidon import poseidon_hash, hash2, ArityError
from .blake512 import blake512
from .eddsa import (
    Signature, SigningKeyPair, InvalidKeyError,
    eddsa_keygen, eddsa_sign, eddsa_verify,
)
