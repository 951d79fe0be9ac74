"""Designated-verifier presentations.

The circuit accepts either a valid credential proof or a signature of the
verifier over the challenge, so the verifier could have produced any such
presentation itself and a transcript convinces no third party.  The
presentation travels encrypted to the verifier: Baby Jubjub Diffie-Hellman
with an ephemeral key, HKDF-SHA256, then ChaCha20-Poly1305 with the
ephemeral key as associated data.
"""

import base64
import json
import secrets
from typing import Dict, Optional, Tuple

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..arith.babyjub import Point
from ..arith.eddsa import InvalidKeyError, SigningKeyPair, ecdh, eddsa_keygen, eddsa_sign
from ..backend import KeyStore, get_backend
from ..circuits.scenarios import CONTENT_SLOTS, META_SLOTS, SlotWitness, assemble_vp_circuit, build_inputs, dummy_signature
from ..credential import Credential
from ..credential.merkle import MerklePath
from ..encoding import AttributeValue, encode_leaf
from ..revocation import NonRevocationWitness
from . import errors as E
from .errors import PresentationError
from .request import ProofRequest
from .vp import Disclosure, VerifiablePresentation
from .wallet import Wallet, create_presentation

HKDF_INFO = b"zkcred/designated-presentation/v1"


def _key(shared: Point, ephemeral: Point) -> bytes:
    return HKDF(hashes.SHA256(), 32, salt=None, info=HKDF_INFO + ephemeral.to_bytes()).derive(shared.to_bytes())


def seal(vp: VerifiablePresentation, encryption_pk: Point) -> dict:
    eph = eddsa_keygen(secrets.token_bytes(32))
    key = _key(ecdh(eph.secret, encryption_pk), eph.public)
    nonce = secrets.token_bytes(12)
    body = json.dumps(vp.to_json(), separators=(",", ":")).encode()
    ct = ChaCha20Poly1305(key).encrypt(nonce, body, eph.public.to_bytes())
    return {"type": "DesignatedEnvelope", "ephemeralPk": eph.public.to_json(),
            "nonce": base64.b64encode(nonce).decode(), "ciphertext": base64.b64encode(ct).decode()}


def open_envelope(envelope: dict, encryption_key: SigningKeyPair) -> VerifiablePresentation:
    try:
        eph = Point.from_json(envelope["ephemeralPk"])
        key = _key(ecdh(encryption_key.secret, eph), eph)
        body = ChaCha20Poly1305(key).decrypt(base64.b64decode(envelope["nonce"]),
                                             base64.b64decode(envelope["ciphertext"]), eph.to_bytes())
        return VerifiablePresentation.from_json(json.loads(body))
    except (InvalidTag, InvalidKeyError, KeyError, ValueError) as e:
        raise PresentationError(E.DECRYPTION_FAILED, f"cannot open envelope: {type(e).__name__}") from None


def designated_presentation(wallet: Wallet, request: ProofRequest, **kw) -> dict:
    """Create the presentation and encrypt it to the designated verifier."""
    if request.designated_verifier is None:
        raise PresentationError(E.UNSUPPORTED_REQUEST, "request names no designated verifier")
    vp = create_presentation(wallet, request, **kw)
    return seal(vp, request.designated_verifier.encryption_pk)


def forge_presentation(request: ProofRequest, signing_key: SigningKeyPair,
                       claims: Dict[Tuple[int, int], object], roots: Dict[int, Tuple[int, int]], *,
                       backend: str = "groth16", keystore: Optional[KeyStore] = None,
                       rng=None) -> VerifiablePresentation:
    """What the designated verifier can do alone: a presentation of arbitrary claims.

    `claims` maps (credential, position) to a leaf or an AttributeValue;
    `roots` maps each registry ref to (root, depth) as the verifier knows it.
    No credential, issuer key or binding key is involved.
    """
    if request.designated_verifier is None or tuple(request.designated_verifier.signing_pk) != tuple(signing_key.public):
        raise PresentationError(E.UNSUPPORTED_REQUEST, "request is not designated to this key")
    ref = request.registries[0].ref if request.registries else next(iter(roots))
    root, depth = roots[ref]
    issuer = request.trusted_issuers[0] if request.trusted_issuers else signing_key.public
    stranger = eddsa_keygen(secrets.token_bytes(32)).public
    revocation = NonRevocationWitness(0, MerklePath([0] * depth, [0] * depth), root, 0, 0)

    def fake(k: Optional[int]) -> Credential:
        meta = [0] * META_SLOTS
        meta[1] = request.credentials[k].schema if k is not None else 0
        meta[2], meta[3] = stranger
        meta[4] = ref
        meta[5] = request.timestamp + 1
        content = [0] * CONTENT_SLOTS
        for (kk, p), v in claims.items():
            if kk == k:
                content[p] = encode_leaf(v.kind, v.payload) if isinstance(v, AttributeValue) else int(v)
        return Credential(meta, content, dummy_signature(), issuer)

    creds = {k: fake(k) for k in range(len(request.credentials))}
    slots = [SlotWitness(creds[0], revocation)]
    slots += [SlotWitness(fake(None), revocation) for _ in range(request.chain - 1)]
    slots += [SlotWitness(creds[k], revocation) for k in range(1, len(request.credentials))]
    spec = request.spec(depth)
    inputs = build_inputs(spec, slots, request.challenge, request.timestamp, signing_key.public,
                          eddsa_sign(signing_key, request.challenge))
    cs = assemble_vp_circuit(spec)
    witness = cs.evaluate(inputs)
    pk, _ = (keystore or KeyStore()).get(cs, backend, rng)
    proof = get_backend(backend).prove(pk, cs, witness, rng)
    disclosures = [Disclosure(k, p, creds[k].content[p]) for k, p in spec.revealed]
    for i, d in enumerate(disclosures):
        v = claims.get((d.cred, d.position))
        if isinstance(v, AttributeValue):
            disclosures[i] = Disclosure(d.cred, d.position, d.leaf, None, v.kind, v.payload)
    return VerifiablePresentation(request.request_id, spec, proof.backend, proof.digest, proof.data,
                                  dict(zip(cs.public_names(), proof.public_inputs)), disclosures)
