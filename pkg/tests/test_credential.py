import pytest

from zkcred.arith.poseidon import hash2
from zkcred.credential import (AttributeDescriptor, Credential, MetaInputs, Schema, SchemaError,
                               SchemaMismatchError, issue, merkle_prove, merkle_root, merkle_verify)
from zkcred.credential.credential import CapacityError
from zkcred.credential.merkle import ArityError

from conftest import SCHEMA, keypair, random_attrs


def test_merkle_prove_verify(rng):
    leaves = [rng.getrandbits(200) for _ in range(16)]
    root = merkle_root(leaves)
    for i in range(16):
        path = merkle_prove(leaves, i)
        assert merkle_verify(leaves[i], i, path, root)
        assert not merkle_verify(leaves[i] + 1, i, path, root)
    with pytest.raises(ArityError):
        merkle_root([1, 2, 3])


def test_schema_validation():
    with pytest.raises(SchemaError):
        Schema("s", [AttributeDescriptor(0, "a", "integer"), AttributeDescriptor(0, "b", "integer")])
    with pytest.raises(SchemaError):
        Schema("s", [AttributeDescriptor(9, "a", "integer")])
    with pytest.raises(SchemaError):
        Schema("s", [AttributeDescriptor(0, "a", "colour")])
    assert Schema.from_json(SCHEMA.to_json()).hash == SCHEMA.hash


def test_issue_layout_and_signature(rng):
    issuer, holder = keypair(rng), keypair(rng)
    cred = issue(issuer, SCHEMA, MetaInputs(7, 99, holder.public, 1234, True), random_attrs(rng))
    assert cred.check()
    assert cred.revocation_id == 7 and cred.registry_ref == 99 and cred.expiration == 1234
    assert cred.binding_pk == holder.public and cred.delegatable
    assert cred.schema_hash == SCHEMA.hash
    assert cred.root == hash2(merkle_root(cred.meta), merkle_root(cred.content))
    for p in range(8):
        sibs, dirs = cred.content_path(p)
        node = cred.content[p]
        for s, d in zip(sibs, dirs):
            node = hash2(s, node) if d else hash2(node, s)
        assert node == cred.root


def test_json_roundtrip_keeps_signature(rng):
    cred = issue(keypair(rng), SCHEMA, MetaInputs(1, 2, keypair(rng).public, 3), random_attrs(rng))
    again = Credential.from_json(cred.to_json())
    assert again.check() and again.content == cred.content and again.raw_attributes == cred.raw_attributes


def test_tampered_credential_fails_check(rng):
    cred = issue(keypair(rng), SCHEMA, MetaInputs(1, 2, keypair(rng).public, 3), random_attrs(rng))
    cred.content[0] += 1
    cred.__dict__.pop("content_root", None)
    cred.__dict__.pop("root", None)
    assert not cred.check()


def test_issue_errors(rng):
    issuer, holder = keypair(rng), keypair(rng)
    attrs = random_attrs(rng)
    with pytest.raises(SchemaMismatchError):
        issue(issuer, SCHEMA, MetaInputs(1, 2, holder.public, 3), {**attrs, "extra": 1})
    with pytest.raises(SchemaMismatchError):
        issue(issuer, SCHEMA, MetaInputs(1, 2, holder.public, 3), {**attrs, "age": "old"})
    with pytest.raises(CapacityError):
        issue(issuer, SCHEMA, MetaInputs(500, 2, holder.public, 3), attrs, capacity=252)
