"""Re-issuance with the same binding key, without showing that key to the issuer.

1. The holder answers a request with binding_commitment set; the
   presentation outputs C = H(bx, by, challenge) for its binding key.
2. The holder sends n = H(bx, by), the level-1 meta node over the two
   binding-key leaves, with a proof that one key opens both C and n.
3. The issuer signs a new credential whose meta root is built from n in
   place of the two leaves, and returns it as a draft.
4. The holder fills in the key and checks the signature.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from ..arith.babyjub import Point
from ..arith.eddsa import Signature, SigningKeyPair, eddsa_sign
from ..arith.field import from_hex, to_hex
from ..arith.poseidon import hash2
from ..backend import BACKEND_IDS, KeyStore, Proof, get_backend
from ..circuits import gadgets
from ..circuits.r1cs import ConstraintSystem, ConstraintViolation
from ..credential import Credential, MetaInputs, Schema, encode_attributes
from ..credential.credential import META_BINDING_X, META_BINDING_Y, build_meta
from ..credential.merkle import merkle_root
from . import errors as E
from .errors import PresentationError
from .vp import VerifiablePresentation

COMMITMENT = "Binding commitment"
NODE = "Binding node"


@lru_cache(maxsize=None)
def carryover_circuit() -> ConstraintSystem:
    cs = ConstraintSystem("binding-carryover")
    challenge = cs.input("challenge", public=True)
    commitment = cs.input("commitment", public=True)
    node = cs.input("node", public=True)
    bx, by = cs.input("binding.x"), cs.input("binding.y")
    cs.enforce_equal(gadgets.poseidon(cs, [bx, by, challenge]), commitment, COMMITMENT)
    cs.enforce_equal(gadgets.poseidon(cs, [bx, by]), node, NODE)
    return cs


def binding_node(pk) -> int:
    return hash2(pk[0], pk[1])


@dataclass(frozen=True)
class CarryoverBundle:
    challenge: int
    commitment: int
    node: int
    proof: Proof

    def to_json(self) -> dict:
        return {"challenge": to_hex(self.challenge), "commitment": to_hex(self.commitment),
                "node": to_hex(self.node), "proof": self.proof.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "CarryoverBundle":
        return cls(from_hex(d["challenge"]), from_hex(d["commitment"]), from_hex(d["node"]),
                   Proof.from_json(d["proof"]))


def binding_carryover(vp: VerifiablePresentation, binding_pk: Point, challenge: int, *,
                      backend: str = "groth16", keystore: Optional[KeyStore] = None, rng=None) -> CarryoverBundle:
    """Holder: prove that the key committed in `vp` opens the meta node sent to the issuer."""
    commitment = vp.output("binding_commitment")
    if commitment is None:
        raise PresentationError(E.UNSUPPORTED_REQUEST, "presentation carries no binding commitment")
    cs = carryover_circuit()
    node = binding_node(binding_pk)
    inputs = {"challenge": challenge, "commitment": commitment, "node": node,
              "binding.x": binding_pk[0], "binding.y": binding_pk[1]}
    try:
        w = cs.evaluate(inputs)
    except ConstraintViolation:
        raise PresentationError(E.UNSATISFIED, "binding key does not match the presented commitment") from None
    pk, _ = (keystore or KeyStore()).get(cs, backend, rng)
    return CarryoverBundle(challenge, commitment, node, get_backend(backend).prove(pk, cs, w, rng))


def check_carryover(bundle: CarryoverBundle, vp: VerifiablePresentation, challenge: int, *,
                    keystore: Optional[KeyStore] = None) -> bool:
    """Issuer: the bundle proof holds for this presentation's commitment and challenge.

    The presentation itself is checked separately with verify_presentation.
    """
    if bundle.commitment != vp.output("binding_commitment") or bundle.challenge != challenge:
        return False
    cs = carryover_circuit()
    backend = get_backend(bundle.proof.backend)
    try:
        vk = (keystore or KeyStore()).verification_key(cs, BACKEND_IDS[bundle.proof.backend], create=False)
    except (FileNotFoundError, KeyError):
        return False
    return backend.verify(vk, bundle.proof, [challenge, bundle.commitment, bundle.node])


@dataclass
class CredentialDraft:
    """A signed credential whose two binding-key leaves are still blank."""
    meta: list
    node: int
    content: list
    signature: Signature
    issuer_pk: Point
    schema: Optional[Schema] = None
    raw_attributes: Optional[dict] = None

    def to_json(self) -> dict:
        return {"meta": [to_hex(x) for x in self.meta], "node": to_hex(self.node),
                "content": [to_hex(x) for x in self.content], "signature": self.signature.to_json(),
                "issuerPk": self.issuer_pk.to_json(),
                "schema": self.schema.to_json() if self.schema else None}


def _meta_root_with_node(meta, node: int) -> int:
    left = hash2(hash2(meta[0], meta[1]), node)
    right = hash2(hash2(meta[4], meta[5]), hash2(meta[6], meta[7]))
    return hash2(left, right)


def issue_with_node(issuer: SigningKeyPair, schema: Schema, meta: MetaInputs, node: int,
                    attributes) -> CredentialDraft:
    """Issuer: sign a credential knowing only the binding node."""
    content, raw = encode_attributes(schema, attributes)
    leaves = build_meta(schema.hash, MetaInputs(meta.revocation_id, meta.registry_ref, (0, 0),
                                                meta.expiration_ts, meta.delegatable))
    root = hash2(_meta_root_with_node(leaves, node), merkle_root(content))
    return CredentialDraft(leaves, node, content, eddsa_sign(issuer, root), issuer.public, schema, raw)


def complete_draft(draft: CredentialDraft, binding_pk: Point) -> Credential:
    """Holder: fill in the binding key; refuses drafts that do not verify."""
    if binding_node(binding_pk) != draft.node:
        raise PresentationError(E.MISSING_BINDING_KEY, "draft was issued for a different binding key")
    meta = list(draft.meta)
    meta[META_BINDING_X], meta[META_BINDING_Y] = binding_pk[0], binding_pk[1]
    cred = Credential(meta, list(draft.content), draft.signature, draft.issuer_pk, draft.schema,
                      dict(draft.raw_attributes or {}))
    if not cred.check():
        raise PresentationError(E.INVALID_PRESENTATION, "issuer signature does not cover the completed credential")
    return cred
