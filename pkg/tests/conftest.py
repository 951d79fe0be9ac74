import json
import random
import time
from pathlib import Path

import pytest

from zkcred.arith.eddsa import eddsa_keygen
from zkcred.backend import KeyStore
from zkcred.credential import AttributeDescriptor, MetaInputs, Schema, issue
from zkcred.credential.schema import registry_ref_hash
from zkcred.presentation import RequestedCredential, VerifierPolicy, Wallet, new_request
from zkcred.revocation import RevocationRegistry

DATA = Path(__file__).parent / "data"

SCHEMA = Schema("person", [
    AttributeDescriptor(0, "name", "short-string"),
    AttributeDescriptor(1, "birthdate", "date"),
    AttributeDescriptor(2, "bio", "long-string"),
    AttributeDescriptor(3, "age", "integer"),
    AttributeDescriptor(4, "lat", "coordinate"),
    AttributeDescriptor(5, "lon", "coordinate"),
    AttributeDescriptor(6, "member", "boolean"),
    AttributeDescriptor(7, "score", "float"),
])


def load_data(name):
    return json.loads((DATA / name).read_text())


def random_attrs(rng: random.Random) -> dict:
    return {
        "name": "".join(rng.choice("abcdefghij") for _ in range(rng.randint(1, 20))),
        "birthdate": rng.randrange(0, 2 ** 31),
        "bio": "bio " * rng.randint(1, 40),
        "age": rng.randrange(0, 120),
        "lat": round(rng.uniform(-90, 90), 7),
        "lon": round(rng.uniform(-180, 180), 7),
        "member": rng.random() < 0.5,
        "score": round(rng.uniform(-1000, 1000), 3),
    }


def keypair(rng: random.Random):
    return eddsa_keygen(rng.getrandbits(256).to_bytes(32, "little"))


class World:
    """One issuer, one registry, one holder wallet and a verifier policy."""

    def __init__(self, rng: random.Random, depth: int = 13, backend: str = "dev"):
        self.rng = rng
        self.issuer = keypair(rng)
        self.registry = RevocationRegistry(depth, f"reg-{rng.getrandbits(32):08x}")
        self.descriptor = self.registry.descriptor(self.issuer.public)
        self.ref = registry_ref_hash(self.descriptor)
        self.wallet = Wallet()
        self.binding = self.wallet.new_binding_key(rng.getrandbits(256).to_bytes(32, "little"))
        self.wallet.add_registry(self.ref, self.registry)
        self.policy = VerifierPolicy([self.issuer.public], backend=backend)
        self.policy.add_registry(self.descriptor, self.registry)
        self.now = int(time.time())

    def issue(self, attrs=None, *, issuer=None, binding=None, rid=None, expires=None,
              delegatable=False, schema=SCHEMA, add=True):
        rid = self.rng.randrange(min(self.registry.capacity, 1 << 20)) if rid is None else rid
        cred = issue(issuer or self.issuer, schema,
                     MetaInputs(rid, self.ref, binding or self.binding.public,
                                self.now + 10 ** 6 if expires is None else expires, delegatable),
                     attrs or random_attrs(self.rng))
        if add:
            self.wallet.add_credential(cred)
        return cred

    def request(self, reveal=(0,), schemas=(SCHEMA,), **kw):
        kw.setdefault("trusted_issuers", self.policy.trusted_issuers)
        kw.setdefault("timestamp", self.now)
        reveals = reveal if reveal and isinstance(reveal[0], (list, tuple)) else [reveal]
        reveals = list(reveals) + [()] * (len(schemas) - len(reveals))
        return new_request([RequestedCredential(s.hash, tuple(r)) for s, r in zip(schemas, reveals)], **kw)


@pytest.fixture(scope="session")
def keystore(tmp_path_factory):
    return KeyStore(tmp_path_factory.mktemp("keys"))


@pytest.fixture
def rng(request):
    return random.Random(request.node.name)


@pytest.fixture
def world(rng):
    return World(rng)
