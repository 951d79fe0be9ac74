"""Shared setup for the demo scripts: one issuer, one registry, one holder."""

import argparse
import secrets
import time

from zkcred.arith.eddsa import eddsa_keygen
from zkcred.backend import KeyStore
from zkcred.credential import AttributeDescriptor, MetaInputs, Schema, issue
from zkcred.credential.schema import registry_ref_hash
from zkcred.presentation import VerifierPolicy, Wallet
from zkcred.revocation import RevocationRegistry

PERSON = Schema("person", [
    AttributeDescriptor(0, "name", "short-string"),
    AttributeDescriptor(1, "birthdate", "date"),
    AttributeDescriptor(2, "bio", "long-string"),
    AttributeDescriptor(3, "age", "integer"),
    AttributeDescriptor(4, "lat", "coordinate"),
    AttributeDescriptor(5, "lon", "coordinate"),
    AttributeDescriptor(6, "member", "boolean"),
    AttributeDescriptor(7, "score", "float"),
])

ALICE = {"name": "alice", "birthdate": "1990-04-01", "bio": "likes long walks through the proof system " * 3,
         "age": 35, "lat": 48.1374, "lon": 11.5755, "member": True, "score": 97.5}


def parse_args(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--backend", default="groth16", choices=["groth16", "dev"],
                   help="dev skips the real proof system (fast, not zero-knowledge)")
    p.add_argument("--keys", help="key cache directory (default $ZKCRED_HOME/keys)")
    return p.parse_args()


def new_key():
    return eddsa_keygen(secrets.token_bytes(32))


class Setup:
    def __init__(self, backend, keys=None, depth=13):
        self.backend = backend
        self.keystore = KeyStore(keys)
        self.issuer = new_key()
        self.registry = RevocationRegistry(depth, "demo-registry")
        self.descriptor = self.registry.descriptor(self.issuer.public)
        self.ref = registry_ref_hash(self.descriptor)
        self.wallet = Wallet()
        self.binding = self.wallet.new_binding_key()
        self.wallet.add_registry(self.ref, self.registry)
        self.policy = VerifierPolicy([self.issuer.public], backend=backend)
        self.policy.add_registry(self.descriptor, self.registry)
        self.next_id = 1000

    def issue(self, attrs, *, issuer=None, binding=None, delegatable=False, schema=PERSON):
        self.next_id += 1
        cred = issue(issuer or self.issuer, schema,
                     MetaInputs(self.next_id, self.ref, binding or self.binding.public,
                                int(time.time()) + 365 * 86400, delegatable), attrs)
        self.wallet.add_credential(cred)
        return cred


def timed(label, fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    print(f"  {label}: {time.perf_counter() - t:.2f} s")
    return out
