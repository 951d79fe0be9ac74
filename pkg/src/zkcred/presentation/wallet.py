"""Holder side: credential storage and presentation generation."""

import json
from pathlib import Path
from typing import Dict, List, Optional

from ..arith.eddsa import SigningKeyPair, eddsa_keygen, eddsa_sign
from ..backend import KeyStore, get_backend
from ..circuits.r1cs import ConstraintViolation
from ..circuits.scenarios import (ATTRIBUTE_LINK, SCENARIOS, SlotWitness, assemble_vp_circuit,
                                  build_inputs)
from ..credential import Credential
from ..credential.schema import registry_ref_hash
from ..revocation import ClientRegistryState, RegistryError, RevokedError, SyncError, sync_client_state
from . import errors as E
from .errors import PresentationError
from .policy import open_registry
from .request import ProofRequest
from .vp import JSON_SCALARS, Disclosure, VerifiablePresentation


class SyncedRegistry:
    """A local full mirror of a registry, refreshed from its endpoint."""

    def __init__(self, descriptor: dict):
        self.descriptor = descriptor
        self.state = ClientRegistryState(int(descriptor["depth"]))

    @property
    def depth(self) -> int:
        return self.state.depth

    @property
    def version(self) -> int:
        return self.state.version

    def refresh(self):
        reg, client = open_registry(self.descriptor)
        if client is not None:
            sync_client_state(client, self.descriptor["id"], self.state)
        else:
            self.state.apply_deltas(reg.deltas_since(self.state.version))

    def witness(self, rid: int):
        return self.state.witness(rid)


class Wallet:
    """Credentials, binding keys and registry sources of one holder.

    A registry source is anything with `depth`, `version` and
    `witness(rid)`; a RevocationRegistry, a ClientRegistryState or a
    SyncedRegistry all qualify.  Sources with a `refresh()` method are
    refreshed before each presentation.
    """

    def __init__(self):
        self.credentials: List[Credential] = []
        self.binding_keys: Dict[tuple, SigningKeyPair] = {}
        self.registries: Dict[int, object] = {}

    def add_credential(self, cred: Credential) -> Credential:
        self.credentials.append(cred)
        return cred

    def add_binding_key(self, kp: SigningKeyPair) -> SigningKeyPair:
        self.binding_keys[tuple(kp.public)] = kp
        return kp

    def new_binding_key(self, seed: Optional[bytes] = None) -> SigningKeyPair:
        import secrets
        return self.add_binding_key(eddsa_keygen(seed if seed is not None else secrets.token_bytes(32)))

    def add_registry(self, ref, source) -> int:
        if isinstance(ref, dict):
            ref = registry_ref_hash(ref)
        self.registries[int(ref)] = source
        return int(ref)

    def binding_key(self, pk) -> Optional[SigningKeyPair]:
        return self.binding_keys.get(tuple(pk))

    # persistence: binding seeds are written in the clear, so the file must stay private
    def to_json(self) -> dict:
        return {"credentials": [c.to_json() for c in self.credentials],
                "bindingKeys": [kp.secret.hex() for kp in self.binding_keys.values()],
                "registries": [s.descriptor for s in self.registries.values() if isinstance(s, SyncedRegistry)]}

    @classmethod
    def from_json(cls, doc: dict) -> "Wallet":
        w = cls()
        for c in doc.get("credentials", []):
            w.add_credential(Credential.from_json(c))
        for seed in doc.get("bindingKeys", []):
            w.add_binding_key(eddsa_keygen(bytes.fromhex(seed)))
        for d in doc.get("registries", []):
            w.add_registry(d, SyncedRegistry(d))
        return w

    @classmethod
    def load(cls, path) -> "Wallet":
        p = Path(path)
        return cls.from_json(json.loads(p.read_text())) if p.exists() else cls()

    def save(self, path):
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(self.to_json(), indent=2))
        p.chmod(0o600)


# --- selection ---------------------------------------------------------------

def _chain_of(wallet: Wallet, leaf: Credential, length: int) -> List[Credential]:
    chain = [leaf]
    while len(chain) < length:
        issuer = tuple(chain[-1].issuer_pk)
        up = next((c for c in wallet.credentials if tuple(c.binding_pk) == issuer), None)
        if up is None:
            raise PresentationError(E.BROKEN_CHAIN, f"no credential delegating to the issuer of level {len(chain) - 1}")
        if not up.delegatable:
            raise PresentationError(E.NOT_DELEGATABLE, f"chain level {len(chain)} is not delegatable")
        chain.append(up)
    return chain


def _revocation(wallet: Wallet, request: ProofRequest, cred: Credential, refreshed: set):
    ref = cred.registry_ref
    if not request.accepts_registry(ref):
        raise PresentationError(E.UNKNOWN_REGISTRY, "credential registry is not accepted by the request")
    source = wallet.registries.get(ref)
    if source is None:
        raise PresentationError(E.UNKNOWN_REGISTRY, "wallet has no source for the credential registry")
    try:
        if hasattr(source, "refresh") and ref not in refreshed:
            source.refresh()
            refreshed.add(ref)
        if source.version < request.min_version(ref):
            raise PresentationError(E.STALE_REGISTRY, f"registry state at version {source.version}, "
                                                      f"request needs {request.min_version(ref)}")
        return source.depth, source.witness(cred.revocation_id)
    except RevokedError as e:
        raise PresentationError(E.REVOKED, str(e)) from None
    except (SyncError, RegistryError, OSError) as e:
        raise PresentationError(E.STALE_REGISTRY, f"registry state unusable: {e}") from None


def _select(wallet: Wallet, request: ProofRequest, k: int, refreshed: set):
    """(credentials, witnesses, depth) for requested credential k; chains for k = 0."""
    want = request.credentials[k]
    length = request.chain if k == 0 else 1
    failure = None
    for cred in wallet.credentials:
        if cred.schema_hash != want.schema:
            continue
        try:
            chain = _chain_of(wallet, cred, length)
            if not request.trusts(chain[-1].issuer_pk):
                raise PresentationError(E.NO_MATCHING_CREDENTIAL, "issuer not trusted by the request")
            if wallet.binding_key(cred.binding_pk) is None:
                raise PresentationError(E.MISSING_BINDING_KEY, "binding key for the credential is not in the wallet")
            for c in chain:
                if c.expiration <= request.timestamp:
                    raise PresentationError(E.EXPIRED, "credential expired at the request time")
            found = [_revocation(wallet, request, c, refreshed) for c in chain]
        except PresentationError as e:
            failure = failure or e
            continue
        depths = {d for d, _ in found}
        if len(depths) != 1:
            failure = failure or PresentationError(E.UNSUPPORTED_REQUEST, "chain spans registries of different depths")
            continue
        return chain, [w for _, w in found], depths.pop()
    if failure is not None and failure.code != E.NO_MATCHING_CREDENTIAL:
        raise failure
    raise PresentationError(E.NO_MATCHING_CREDENTIAL, f"no credential matches requested credential {k}")


def _disclosures(spec, creds_by_k) -> List[Disclosure]:
    out = []
    for k, p in spec.revealed:
        cred = creds_by_k[k]
        label = kind = value = None
        if cred.schema is not None:
            try:
                d = cred.schema.by_position(p)
                label, kind = d.label, d.kind
            except Exception:
                pass
        raw = cred.raw_attributes.get(p)
        if raw is not None and isinstance(raw.payload, JSON_SCALARS):
            kind, value = raw.kind, raw.payload
        out.append(Disclosure(k, p, cred.content[p], label, kind, value))
    return out


def _check_links(spec, creds_by_k):
    for pred in spec.predicates:
        doc = pred.to_json()
        if doc["type"] != "link":
            continue
        a, b = doc["a"], doc["b"]
        va = creds_by_k[int(a.get("cred", 0))].content[int(a["attr"])]
        vb = creds_by_k[int(b.get("cred", 0))].content[int(b["attr"])]
        if va != vb:
            # deliberately says nothing about either value
            raise PresentationError(E.UNEQUAL_ATTRIBUTES, "linked attributes differ")


def create_presentation(wallet: Wallet, request: ProofRequest, *, backend: str = "groth16",
                        keystore: Optional[KeyStore] = None, rng=None, create_keys: bool = True,
                        trust_new_circuits: bool = True) -> VerifiablePresentation:
    """Answer `request` with a proof over the wallet's credentials.

    Raises PresentationError with a stable code when the wallet cannot or
    will not answer.
    """
    if not request.credentials:
        raise PresentationError(E.UNSUPPORTED_REQUEST, "request asks for no credential")
    refreshed: set = set()
    slots: List[SlotWitness] = []
    creds_by_k: Dict[int, Credential] = {}
    depths = set()
    for k in range(len(request.credentials)):
        chain, witnesses, depth = _select(wallet, request, k, refreshed)
        depths.add(depth)
        creds_by_k[k] = chain[0]
        holder = eddsa_sign(wallet.binding_key(chain[0].binding_pk), request.challenge)
        for i, (c, w) in enumerate(zip(chain, witnesses)):
            slots.append(SlotWitness(c, w, holder if i == 0 else None))
    if len(depths) != 1:
        raise PresentationError(E.UNSUPPORTED_REQUEST, "credentials come from registries of different depths")
    try:
        spec = request.spec(depths.pop())
    except ValueError as e:
        raise PresentationError(E.UNSUPPORTED_REQUEST, str(e)) from None
    _check_links(spec, creds_by_k)

    verifier_pk = request.designated_verifier.signing_pk if request.designated_verifier else None
    inputs = build_inputs(spec, slots, request.challenge, request.timestamp, verifier_pk)
    cs = assemble_vp_circuit(spec)
    try:
        witness = cs.evaluate(inputs)
    except ConstraintViolation as e:
        code = E.UNEQUAL_ATTRIBUTES if e.check == ATTRIBUTE_LINK else E.UNSATISFIED
        raise PresentationError(code, "credentials do not satisfy the presentation circuit",
                                cs.describe(e.index)) from None
    named = witness.named()
    for k, pred in enumerate(spec.predicates):
        doc = pred.to_json()
        if doc["type"] != "link" and named[f"pred{k}"] != int(doc.get("expect", 1)):
            raise PresentationError(E.PREDICATE_FALSE, f"predicate {k} does not hold")

    keystore = keystore or KeyStore()
    keys = keystore.load(cs, backend)
    if keys is None:
        if not create_keys:
            raise PresentationError(E.MISSING_PROVING_KEY, f"no {backend} proving key for circuit {cs.name}")
        if not trust_new_circuits and spec.name not in SCENARIOS:
            raise PresentationError(E.UNTRUSTED_CIRCUIT,
                                    f"refusing to generate keys for non-preset circuit {cs.name}")
        keys = keystore.get(cs, backend, rng)
    proof = get_backend(backend).prove(keys[0], cs, witness, rng)
    publics = dict(zip(cs.public_names(), proof.public_inputs))
    return VerifiablePresentation(request.request_id, spec, proof.backend, proof.digest, proof.data,
                                  publics, _disclosures(spec, creds_by_k))


def present_chain(wallet: Wallet, request: ProofRequest, **kw) -> VerifiablePresentation:
    """Presentation of a delegated credential together with its chain."""
    if request.chain < 2:
        raise PresentationError(E.UNSUPPORTED_REQUEST, "request does not ask for a delegation chain")
    return create_presentation(wallet, request, **kw)


def link_attributes(wallet: Wallet, request: ProofRequest, **kw) -> VerifiablePresentation:
    """Presentation proving attribute equality across credentials."""
    if not any(p["type"] == "link" for p in request.predicates):
        raise PresentationError(E.UNSUPPORTED_REQUEST, "request has no link predicate")
    return create_presentation(wallet, request, **kw)
