"""Verifier side: every check a presentation must pass, reported one by one."""

from dataclasses import dataclass, field
from typing import List, Optional

from ..backend import BACKEND_IDS, KeyStore, get_backend
from ..circuits.scenarios import (CONTENT_SLOTS, META_SLOTS, assemble_vp_circuit, name,
                                  predicate_publics)
from ..encoding import verify_raw_attachment
from .policy import VerifierPolicy
from .request import ProofRequest, canonical_spec
from .vp import VerifiablePresentation

SCHEMA_META = 1
REGISTRY_META = 4


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.ok]

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(ok), detail))
        return bool(ok)

    def to_json(self) -> dict:
        return {"valid": self.ok, "checks": [c.to_json() for c in self.checks]}


def _pub(vp: VerifiablePresentation, key: str) -> Optional[int]:
    return vp.publics.get(key)


def verify_presentation(vp: VerifiablePresentation, request: ProofRequest,
                        policy: Optional[VerifierPolicy] = None, *, keystore: Optional[KeyStore] = None,
                        now: Optional[int] = None) -> VerificationReport:
    """Check `vp` against the request it claims to answer.

    Every public value the verifier can derive itself (challenge, time,
    disclosure indices, predicate constants, designated key) is recomputed
    from the request and compared; the proof is then checked over the
    presented public vector.
    """
    r = VerificationReport()
    r.add("request-id", vp.request_id == request.request_id)
    spec = canonical_spec(vp.spec)
    try:
        expected = request.spec(spec.depth)
    except ValueError as e:
        r.add("spec", False, str(e))
        return r
    if not r.add("spec", spec == expected, "presentation shape differs from the request" if spec != expected else ""):
        return r
    cs = assemble_vp_circuit(spec)
    names = cs.public_names()
    if not r.add("circuit", vp.digest == cs.digest() and set(names) == set(vp.publics),
                 "" if vp.digest == cs.digest() else "circuit digest mismatch"):
        return r

    r.add("challenge", _pub(vp, "challenge") == request.challenge)
    r.add("timestamp", _pub(vp, "timestamp") == request.timestamp)
    if now is not None:
        ttl = policy.request_ttl if policy else 600
        r.add("request-fresh", abs(now - request.timestamp) <= ttl,
              f"request time {request.timestamp}, now {now}")

    derived = dict(predicate_publics(spec))
    for k in range(spec.credentials):
        s = spec.slot_of(k)
        if spec.full_disclosure(k):
            derived[name(s, "anchor")] = META_SLOTS
        for p in range(CONTENT_SLOTS):
            if name(s, f"index[{p}]") in vp.publics:
                derived[name(s, f"index[{p}]")] = META_SLOTS + p
    if request.designated_verifier is not None:
        derived["verifier.x"], derived["verifier.y"] = request.designated_verifier.signing_pk
    bad = sorted(k for k, v in derived.items() if vp.publics.get(k) != v)
    r.add("derived-publics", not bad, ", ".join(bad))

    # issuers
    trusted = policy.trusted_issuers if policy and policy.trusted_issuers else request.trusted_issuers
    trusted = {tuple(p) for p in trusted}
    for s in spec.public_issuer_slots():
        pk = (_pub(vp, name(s, "issuer.x")), _pub(vp, name(s, "issuer.y")))
        r.add(f"issuer[{s}]", pk in trusted, "" if pk in trusted else "issuer key not trusted")

    for k in range(spec.credentials):
        s = spec.slot_of(k)
        r.add(f"schema[{k}]", _pub(vp, name(s, f"meta[{SCHEMA_META}]")) == request.credentials[k].schema)

    # registries, one per slot
    for s in range(spec.slots):
        ref = _pub(vp, name(s, f"meta[{REGISTRY_META}]"))
        root = _pub(vp, name(s, "rev.root"))
        label = f"registry[{s}]"
        if not request.accepts_registry(ref):
            r.add(label, False, "registry not accepted by the request")
            continue
        view = None
        if policy is not None and ref in policy.registries:
            try:
                view = policy.view(ref)
            except Exception as e:       # unreachable endpoint and the like
                r.add(label, False, f"registry history unavailable: {e}")
                continue
        if view is None:
            r.add(label, False, "registry unknown to the verifier policy")
            continue
        if view.depth != spec.depth:
            r.add(label, False, f"registry depth {view.depth}, circuit depth {spec.depth}")
            continue
        fresh, detail = view.freshness(root, request.timestamp, min(request.max_age, policy.max_age),
                                       policy.max_version_lag)
        v = view.version_of(root)
        if fresh and v < request.min_version(ref):
            fresh, detail = False, f"root version {v} below requested {request.min_version(ref)}"
        r.add(label, fresh, detail)

    # disclosures and raw attachments
    given = {(d.cred, d.position): d for d in vp.disclosures}
    for k, p in spec.revealed:
        d = given.get((k, p))
        leaf = vp.leaf(k, p)
        if d is None:
            r.add(f"disclosure[{k}:{p}]", False, "missing")
            continue
        ok = d.leaf == leaf
        detail = "" if ok else "leaf differs from the proven public value"
        if ok and d.kind == "long-string" and d.value is None:
            ok, detail = False, "long string revealed without its raw value"
        if ok and d.raw() is not None and not verify_raw_attachment(d.raw(), leaf):
            ok, detail = False, "raw value does not re-encode to the leaf"
        r.add(f"disclosure[{k}:{p}]", ok, detail)

    for k, pred in enumerate(spec.predicates):
        doc = pred.to_json()
        if doc["type"] != "link":
            out = _pub(vp, f"pred{k}")
            r.add(f"predicate[{k}]", out == int(doc.get("expect", 1)), f"output {out}")

    if spec.binding_commitment:
        r.add("binding-commitment", _pub(vp, "binding_commitment") is not None)

    # the proof itself
    try:
        backend = get_backend(vp.backend)
    except ValueError as e:
        r.add("proof", False, str(e))
        return r
    if policy is not None and get_backend(policy.backend) is not backend:
        r.add("proof", False, f"backend {vp.backend} not accepted by the policy")
        return r
    try:
        vk = (keystore or KeyStore()).verification_key(cs, BACKEND_IDS.get(vp.backend, vp.backend), create=False)
    except (FileNotFoundError, ValueError) as e:
        r.add("proof", False, f"no verification key: {e}")
        return r
    proof = vp.proof_object(names)
    r.add("proof", backend.verify(vk, proof), "")
    return r

