"""zkcred command line.

Everything is read from and written to JSON files (or stdout).  State lives
under a data directory, $ZKCRED_HOME or ~/.zkcred unless --home is given:

    issuer.json          default issuer signing key (written by keygen)
    wallet.json          holder wallet: credentials, binding keys, registries
    policy.json          verifier policy: trusted issuers, accepted registries
    registries/<name>/   registry stores
    keys/                proving and verification keys, generated on first use

Exit codes: 0 success, 1 refused or invalid (error JSON on stderr, or the
failing report for verify), 2 bad usage.
"""

import argparse
import json
import secrets
import sys
import time
from pathlib import Path

from .arith.babyjub import Point
from .arith.eddsa import SigningKeyPair, eddsa_keygen
from .arith.field import to_hex
from .backend import ALIASES, KeyStore, get_backend
from .backend.keys import default_home
from .circuits.accounting import REFERENCE_OCCURRENCES, accounting_report, static_reference_report
from .circuits.samples import sample_witness
from .circuits.scenarios import SCENARIOS, assemble_vp_circuit
from .credential import AttributeDescriptor, Credential, MetaInputs, Schema, issue
from .encoding import EncodingError
from .credential.schema import registry_ref_hash
from .presentation import (DesignatedVerifier, PresentationError, ProofRequest, RequestedCredential,
                           VerifiablePresentation, VerifierPolicy, Wallet, create_presentation,
                           new_request, open_envelope, seal, verify_presentation)
from .presentation.wallet import SyncedRegistry
from .revocation import (RegistryClient, RegistryClientError, RegistryError, RegistryService,
                         RegistryStore, RevocationRegistry, serve_in_thread)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# --- files ------------------------------------------------------------------------

def read_json(path):
    if str(path) == "-":
        return json.load(sys.stdin)
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise CliError("FILE_NOT_FOUND", f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise CliError("INVALID_JSON", f"{path}: {e}") from None


def emit(doc, out=None):
    text = json.dumps(doc, indent=2)
    if out and out != "-":
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n")
    else:
        print(text)


def signing_key_doc(kp: SigningKeyPair) -> dict:
    return {"type": "SigningKey", "seed": kp.secret.hex(), "public": kp.public.to_json()}


def load_signing_key(path) -> SigningKeyPair:
    doc = read_json(path)
    if doc.get("type") != "SigningKey":
        raise CliError("INVALID_KEY", f"{path} holds no signing key")
    return eddsa_keygen(bytes.fromhex(doc["seed"]))


def load_public_key(path) -> Point:
    doc = read_json(path)
    if "public" in doc:
        return Point.from_json(doc["public"])
    return Point.from_json(doc)


class Home:
    def __init__(self, root):
        self.root = Path(root) if root else default_home()

    @property
    def wallet_path(self):
        return self.root / "wallet.json"

    @property
    def policy_path(self):
        return self.root / "policy.json"

    @property
    def issuer_key(self):
        return self.root / "issuer.json"

    def registry_dir(self, name: str) -> Path:
        return self.root / "registries" / name

    def keystore(self) -> KeyStore:
        return KeyStore(self.root / "keys")

    def wallet(self) -> Wallet:
        return Wallet.load(self.wallet_path)

    def policy(self, path=None) -> VerifierPolicy:
        p = Path(path) if path else self.policy_path
        return VerifierPolicy.load(p) if p.exists() else VerifierPolicy()


def _registry(home: Home, name: str):
    store = RegistryStore(home.registry_dir(name))
    if not store.exists():
        raise CliError("UNKNOWN_REGISTRY", f"no registry named {name!r} under {home.root}")
    return store, store.load()


# --- commands ---------------------------------------------------------------------

def cmd_keygen(args, home: Home):
    kp = eddsa_keygen(secrets.token_bytes(32))
    if args.binding:
        w = home.wallet()
        w.add_binding_key(kp)
        w.save(home.wallet_path)
        return {"public": kp.public.to_json(), "wallet": str(home.wallet_path)}
    out = Path(args.out) if args.out else home.issuer_key
    if out.exists() and not args.force:
        raise CliError("FILE_EXISTS", f"{out} exists; pass --force to overwrite")
    emit(signing_key_doc(kp), str(out))
    out.chmod(0o600)
    if args.public_out:
        emit({"type": "PublicKey", "public": kp.public.to_json()}, args.public_out)
    return {"public": kp.public.to_json(), "file": str(out)}


def cmd_schema_new(args, home: Home):
    attrs = []
    for i, spec in enumerate(args.attr):
        label, _, kind = spec.partition(":")
        attrs.append(AttributeDescriptor(i, label, kind or "short-string"))
    schema = Schema(args.name, attrs)
    doc = schema.to_json()
    if args.out:
        emit(doc, args.out)
    return {"schema": doc, "hash": to_hex(schema.hash)}


def cmd_registry_new(args, home: Home):
    d = home.registry_dir(args.name)
    store = RegistryStore(d)
    if store.exists():
        raise CliError("REGISTRY_EXISTS", f"registry {args.name!r} already exists")
    issuer = load_public_key(args.issuer_key or home.issuer_key)
    reg = RevocationRegistry(args.depth, args.name, allow_unrevoke=not args.no_unrevoke)
    desc = reg.descriptor(issuer, args.endpoint or str(d.resolve()))
    store.create(reg, desc)
    return {"descriptor": desc, "ref": to_hex(registry_ref_hash(desc))}


def cmd_registry_revoke(args, home: Home):
    status = "valid" if args.restore else "revoked"
    if args.url:
        issuer = load_signing_key(args.issuer_key or home.issuer_key)
        try:
            return RegistryClient.http(args.url).post_status(args.name, issuer, [(args.id, status)])
        except RegistryClientError as e:
            raise CliError(e.code, str(e)) from None
    store, reg = _registry(home, args.name)
    delta = reg.set_status(args.id, status)
    store.append(reg, delta)
    return {"version": delta.version, "root": to_hex(delta.root)}


def cmd_registry_status(args, home: Home):
    if args.url:
        try:
            r = RegistryClient.http(args.url).root(args.name)
        except RegistryClientError as e:
            raise CliError(e.code, str(e)) from None
        return {"registry": args.name, "root": to_hex(r["root"]), "version": r["version"], "depth": r["depth"]}
    _, reg = _registry(home, args.name)
    doc = {"registry": args.name, "root": to_hex(reg.root), "version": reg.version, "depth": reg.depth}
    if args.id is not None:
        doc["id"], doc["valid"] = args.id, reg.status(args.id)
    return doc


def cmd_registry_sync(args, home: Home):
    w = home.wallet()
    out = []
    for ref, src in w.registries.items():
        if isinstance(src, SyncedRegistry):
            src.refresh()
            out.append({"registry": src.descriptor["id"], "version": src.version, "root": to_hex(src.state.root)})
    return {"registries": out}


def cmd_registry_serve(args, home: Home):
    service = RegistryService()
    for name in args.name:
        store, reg = _registry(home, name)
        service.add(reg, Point.from_json(store.descriptor()["issuer"]), store)
    server = serve_in_thread(service, args.host, args.port)
    host, port = server.server_address[:2]
    print(json.dumps({"serving": args.name, "url": f"http://{host}:{port}"}), flush=True)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.shutdown()
    return None


def cmd_issue(args, home: Home):
    issuer = load_signing_key(args.issuer_key or home.issuer_key)
    schema = Schema.from_json(read_json(args.schema))
    attrs = read_json(args.attrs)
    store, reg = _registry(home, args.registry)
    desc = store.descriptor()
    wallet = None
    if args.holder:
        holder = load_public_key(args.holder)
    else:
        wallet = home.wallet()
        holder = next(iter(wallet.binding_keys.values()), None) or wallet.new_binding_key()
        holder = holder.public
    rid = args.revocation_id
    if rid is None:
        counter = store.dir / "next-id"
        rid = int(counter.read_text()) if counter.exists() else 0
        counter.write_text(str(rid + 1))
    expires = args.expires if args.expires is not None else int(time.time()) + 365 * 24 * 3600
    try:
        cred = issue(issuer, schema, MetaInputs(rid, registry_ref_hash(desc), holder, expires, args.delegatable),
                     attrs, reg.capacity)
    except (ValueError, EncodingError) as e:
        raise CliError("ISSUANCE_FAILED", str(e)) from None
    if args.out:
        emit(cred.to_json(), args.out)
    if wallet is not None:
        wallet.add_credential(cred)
        wallet.add_registry(desc, SyncedRegistry(desc))
        wallet.save(home.wallet_path)
    return {"revocationId": rid, "registry": desc["id"], "root": to_hex(cred.root),
            "wallet": str(home.wallet_path) if wallet is not None else None}


def cmd_wallet_import(args, home: Home):
    w = home.wallet()
    cred = Credential.from_json(read_json(args.credential))
    if not cred.check():
        raise CliError("INVALID_CREDENTIAL", "credential signature does not verify")
    w.add_credential(cred)
    if args.registry_descriptor:
        desc = read_json(args.registry_descriptor)
        w.add_registry(desc, SyncedRegistry(desc))
    w.save(home.wallet_path)
    return {"credentials": len(w.credentials)}


def cmd_policy_trust(args, home: Home):
    pol = home.policy(args.policy)
    pk = load_public_key(args.issuer)
    if not pol.trusts(pk):
        pol.trusted_issuers.append(pk)
    pol.save(args.policy or home.policy_path)
    return pol.to_json()


def cmd_policy_registry(args, home: Home):
    pol = home.policy(args.policy)
    desc = read_json(args.descriptor) if args.descriptor else RegistryStore(home.registry_dir(args.name)).descriptor()
    pol.add_registry(desc)
    if args.backend:
        pol.backend = args.backend
    pol.save(args.policy or home.policy_path)
    return pol.to_json()


def cmd_request_new(args, home: Home):
    pol = home.policy(args.policy)
    schemas = [Schema.from_json(read_json(p)) for p in args.schema]
    reveal = [[] for _ in schemas]
    for item in args.reveal or []:
        k, _, label = item.rpartition(":")
        k = int(k) if k else 0
        reveal[k].append(schemas[k].by_label(label).position)
    preds = [read_json(p) for p in args.predicate or []]
    dv = None
    if args.designated_signing_key:
        dv = DesignatedVerifier(load_public_key(args.designated_encryption_key or args.designated_signing_key),
                                load_public_key(args.designated_signing_key))
    req = new_request([RequestedCredential(s.hash, tuple(r)) for s, r in zip(schemas, reveal)],
                      predicates=preds, trusted_issuers=pol.trusted_issuers, registries=list(pol.registries),
                      max_age=pol.max_age, chain=args.chain, designated_verifier=dv,
                      binding_commitment=args.binding_commitment)
    emit(req.to_json(), args.out)
    return None if not args.out else {"request": args.out, "id": req.request_id}


def cmd_present(args, home: Home):
    req = ProofRequest.from_json(read_json(args.request))
    wallet = Wallet.load(args.wallet) if args.wallet else home.wallet()
    vp = create_presentation(wallet, req, backend=ALIASES.get(args.backend, args.backend),
                             keystore=home.keystore(), create_keys=True,
                             trust_new_circuits=args.trust_new_key)
    doc = seal(vp, req.designated_verifier.encryption_pk) if req.designated_verifier else vp.to_json()
    emit(doc, args.out)
    return None if not args.out else {"presentation": args.out, "circuit": vp.spec.name}


def cmd_verify(args, home: Home):
    req = ProofRequest.from_json(read_json(args.request))
    doc = read_json(args.presentation)
    if doc.get("type") == "DesignatedEnvelope":
        if not args.encryption_key:
            raise CliError("MISSING_KEY", "designated presentation needs --encryption-key")
        vp = open_envelope(doc, load_signing_key(args.encryption_key))
    else:
        vp = VerifiablePresentation.from_json(doc)
    report = verify_presentation(vp, req, home.policy(args.policy), keystore=home.keystore(),
                                 now=int(time.time()) if args.check_time else None)
    out = report.to_json()
    out["disclosed"] = [d.to_json() for d in vp.disclosures]
    emit(out, args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_inspect(args, home: Home):
    doc = read_json(args.file)
    kind = doc.get("type")
    if kind == "VerifiablePresentation":
        vp = VerifiablePresentation.from_json(doc)
        cs = assemble_vp_circuit(vp.spec)
        return {"type": kind, "circuit": vp.spec.name, "constraints": cs.num_constraints,
                "backend": vp.backend, "proofBytes": len(vp.proof), "publicInputs": len(vp.publics),
                "disclosed": [d.to_json() for d in vp.disclosures]}
    if kind == "ProofRequest":
        req = ProofRequest.from_json(doc)
        return {"type": kind, "id": req.request_id, "credentials": len(req.credentials),
                "reveal": [list(c.reveal) for c in req.credentials], "predicates": len(req.predicates),
                "chain": req.chain, "designated": req.designated_verifier is not None}
    if "meta" in doc and "content" in doc:
        cred = Credential.from_json(doc)
        return {"type": "Credential", "signatureValid": cred.check(), "revocationId": cred.revocation_id,
                "expiration": cred.expiration, "delegatable": cred.delegatable,
                "attributes": {str(k): {"kind": v.kind, "value": v.payload} for k, v in cred.raw_attributes.items()}}
    return {"type": kind or "unknown", "keys": sorted(doc)}


def cmd_bench(args, home: Home):
    names = list(REFERENCE_OCCURRENCES) if args.scenario == "all" else [args.scenario]
    reports = []
    for n in names:
        if n in SCENARIOS:
            rep = accounting_report(assemble_vp_circuit(SCENARIOS[n]), n)
        elif n in REFERENCE_OCCURRENCES:
            rep = static_reference_report(n)
        else:
            raise CliError("UNKNOWN_SCENARIO", f"unknown scenario {n!r}")
        reports.append(rep)
    if args.timing:
        _timing(args, home, reports)
    if args.format == "json":
        return {"reports": [r.to_json() for r in reports]}
    text = "\n".join(r.to_markdown() if args.format == "markdown" else r.to_csv() for r in reports)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return None


def _timing(args, home: Home, reports):
    """Setup/prove/verify wall time per synthesized scenario, on fresh random inputs."""
    name = ALIASES.get(args.backend, args.backend)
    mod = get_backend(name)
    for rep in reports:
        if rep.scenario not in SCENARIOS:
            continue
        cs = assemble_vp_circuit(SCENARIOS[rep.scenario])
        w = sample_witness(SCENARIOS[rep.scenario])
        t0 = time.perf_counter()
        pk, vk = home.keystore().get(cs, name)
        t1 = time.perf_counter()
        proof = mod.prove(pk, cs, w)
        t2 = time.perf_counter()
        ok = mod.verify(vk, proof)
        t3 = time.perf_counter()
        rep.notes.append(f"timing ({args.backend}): key load or setup {t1 - t0:.2f} s, "
                         f"prove {t2 - t1:.2f} s, verify {1000 * (t3 - t2):.1f} ms, valid={ok}")


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zkcred", description="Anonymous credentials with zk-SNARK presentations.")
    p.add_argument("--home", help="data directory (default $ZKCRED_HOME or ~/.zkcred)")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("keygen", help="generate a signing key")
    k.add_argument("--out", help="key file (default <home>/issuer.json)")
    k.add_argument("--public-out", help="also write the public key here")
    k.add_argument("--binding", action="store_true", help="add a holder binding key to the wallet instead")
    k.add_argument("--force", action="store_true")
    k.set_defaults(func=cmd_keygen)

    s = sub.add_parser("schema").add_subparsers(dest="action", required=True)
    sn = s.add_parser("new", help="create a credential schema")
    sn.add_argument("--name", required=True)
    sn.add_argument("--attr", action="append", required=True, help="label:kind, in position order")
    sn.add_argument("--out")
    sn.set_defaults(func=cmd_schema_new)

    i = sub.add_parser("issue", help="issue a credential")
    i.add_argument("--schema", required=True)
    i.add_argument("--attrs", required=True, help="JSON object label -> value")
    i.add_argument("--issuer-key")
    i.add_argument("--registry", default="default")
    i.add_argument("--revocation-id", type=int)
    i.add_argument("--holder", help="holder public key file; default: the home wallet's binding key")
    i.add_argument("--expires", type=int, help="UNIX time (default one year from now)")
    i.add_argument("--delegatable", action="store_true")
    i.add_argument("--out")
    i.set_defaults(func=cmd_issue)

    r = sub.add_parser("registry").add_subparsers(dest="action", required=True)
    rn = r.add_parser("new")
    rn.add_argument("--name", default="default")
    rn.add_argument("--depth", type=int, default=13)
    rn.add_argument("--issuer-key", help="issuer key file (public part is used)")
    rn.add_argument("--endpoint", help="URL clients sync from (default: the registry directory)")
    rn.add_argument("--no-unrevoke", action="store_true")
    rn.set_defaults(func=cmd_registry_new)
    rr = r.add_parser("revoke")
    rr.add_argument("--id", type=int, required=True, help="revocation id")
    rr.add_argument("--name", default="default")
    rr.add_argument("--url", help="post a signed update to a running service instead")
    rr.add_argument("--issuer-key")
    rr.add_argument("--restore", action="store_true", help="mark valid again")
    rr.set_defaults(func=cmd_registry_revoke)
    rs = r.add_parser("status")
    rs.add_argument("--name", default="default")
    rs.add_argument("--url")
    rs.add_argument("--id", type=int)
    rs.set_defaults(func=cmd_registry_status)
    ry = r.add_parser("sync", help="refresh the wallet's registry mirrors")
    ry.set_defaults(func=cmd_registry_sync)
    rv = r.add_parser("serve")
    rv.add_argument("--name", action="append", required=True)
    rv.add_argument("--host", default="127.0.0.1")
    rv.add_argument("--port", type=int, default=8700)
    rv.set_defaults(func=cmd_registry_serve)

    w = sub.add_parser("wallet").add_subparsers(dest="action", required=True)
    wi = w.add_parser("import")
    wi.add_argument("--credential", required=True)
    wi.add_argument("--registry-descriptor")
    wi.set_defaults(func=cmd_wallet_import)

    po = sub.add_parser("policy").add_subparsers(dest="action", required=True)
    pt = po.add_parser("trust")
    pt.add_argument("--issuer", required=True, help="key file whose public key to trust")
    pt.add_argument("--policy")
    pt.set_defaults(func=cmd_policy_trust)
    pr = po.add_parser("registry")
    pr.add_argument("--name", default="default")
    pr.add_argument("--descriptor")
    pr.add_argument("--backend", choices=["sound", "groth16", "dev"])
    pr.add_argument("--policy")
    pr.set_defaults(func=cmd_policy_registry)

    q = sub.add_parser("request").add_subparsers(dest="action", required=True)
    qn = q.add_parser("new")
    qn.add_argument("--schema", action="append", required=True, help="one per requested credential")
    qn.add_argument("--reveal", action="append", help="label, or k:label for credential k")
    qn.add_argument("--predicate", action="append", help="predicate descriptor file")
    qn.add_argument("--chain", type=int, default=1)
    qn.add_argument("--designated-signing-key")
    qn.add_argument("--designated-encryption-key")
    qn.add_argument("--binding-commitment", action="store_true")
    qn.add_argument("--policy")
    qn.add_argument("--out")
    qn.set_defaults(func=cmd_request_new)

    pp = sub.add_parser("present")
    pp.add_argument("--request", required=True)
    pp.add_argument("--wallet")
    pp.add_argument("--backend", default="sound", choices=["sound", "groth16", "dev"])
    pp.add_argument("--trust-new-key", action="store_true",
                    help="allow key generation for circuits other than the presets")
    pp.add_argument("--out")
    pp.set_defaults(func=cmd_present)

    v = sub.add_parser("verify")
    v.add_argument("--request", required=True)
    v.add_argument("--presentation", required=True)
    v.add_argument("--policy")
    v.add_argument("--encryption-key")
    v.add_argument("--check-time", action="store_true", help="also require a recent request")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    ins = sub.add_parser("inspect")
    ins.add_argument("file")
    ins.set_defaults(func=cmd_inspect)

    b = sub.add_parser("bench", help="constraint accounting report")
    b.add_argument("--scenario", default="all", help="I..VII or all")
    b.add_argument("--format", default="markdown", choices=["markdown", "csv", "json"])
    b.add_argument("--timing", action="store_true", help="also time setup, prove and verify")
    b.add_argument("--backend", default="sound", choices=["sound", "groth16", "dev"])
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    home = Home(args.home)
    try:
        result = args.func(args, home)
    except PresentationError as e:
        return _fail(e.code, str(e), e.detail)
    except CliError as e:
        return _fail(e.code, str(e))
    except RegistryError as e:
        return _fail("REGISTRY_ERROR", str(e))
    except (ValueError, KeyError) as e:
        return _fail("INVALID_INPUT", str(e))
    if isinstance(result, int):
        return result
    if result is not None:
        emit(result)
    return EXIT_OK


def _fail(code: str, message: str, detail=None) -> int:
    err = {"code": code, "message": message}
    if detail is not None:
        err["detail"] = detail
    print(json.dumps({"error": err}), file=sys.stderr)
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
