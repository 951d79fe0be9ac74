import random

import pytest

from zkcred.arith.field import P
from zkcred.backend import (DigestMismatchError, KeyStore, Proof, UnsatisfiedWitnessError, dev, get_backend,
                            groth16)
from zkcred.circuits import gadgets
from zkcred.circuits.r1cs import ConstraintSystem


def small_circuit(name="small"):
    """Public y = Poseidon(x, k); private x, k; plus public bit x < k."""
    cs = ConstraintSystem(name)
    x, k = cs.input("x"), cs.input("k")
    cs.output("y", gadgets.poseidon(cs, [x, k]))
    cs.output("lt", gadgets.less_than(cs, x, k, 64))
    return cs


@pytest.fixture(scope="module")
def g16():
    cs = small_circuit()
    pk, vk = groth16.setup(cs, random.Random(1))
    return cs, pk, vk


@pytest.mark.parametrize("backend", ["groth16", "dev"])
def test_completeness_and_public_binding(g16, backend):
    mod = get_backend(backend)
    cs = g16[0]
    pk, vk = g16[1:] if backend == "groth16" else mod.setup(cs)
    rng = random.Random(2)
    for _ in range(3):
        w = cs.evaluate({"x": rng.getrandbits(60), "k": rng.getrandbits(60)})
        proof = mod.prove(pk, cs, w, rng)
        assert mod.verify(vk, proof)
        forged = list(proof.public_inputs)
        forged[0] = (forged[0] + 1) % P
        assert not mod.verify(vk, proof, forged)
        assert not mod.verify(vk, proof, forged[:-1])


@pytest.mark.parametrize("backend", ["groth16", "dev"])
def test_unsatisfied_witness(g16, backend):
    mod = get_backend(backend)
    cs = g16[0]
    pk, vk = g16[1:] if backend == "groth16" else mod.setup(cs)
    w = cs.evaluate({"x": 3, "k": 9}).values
    w[cs.names["y"]] = (w[cs.names["y"]] + 1) % P
    with pytest.raises(UnsatisfiedWitnessError):
        mod.prove(pk, cs, w)
    assert not mod.verify(vk, mod.prove(pk, cs, w, random.Random(3), force=True))


def test_groth16_proof_bytes_and_mutation(g16):
    cs, pk, vk = g16
    proof = groth16.prove(pk, cs, cs.evaluate({"x": 1, "k": 2}), random.Random(4))
    assert len(proof.data) == groth16.PROOF_BYTES == 128
    for i in (0, 40, 100, 127):
        data = bytearray(proof.data)
        data[i] ^= 1
        assert not groth16.verify(vk, Proof(proof.backend, bytes(data), proof.public_inputs, proof.digest))
    assert not groth16.verify(vk, Proof(proof.backend, proof.data[:-1], proof.public_inputs, proof.digest))
    assert groth16.verify(vk, Proof.from_json(proof.to_json()))


def test_proofs_are_randomized(g16):
    cs, pk, vk = g16
    w = cs.evaluate({"x": 5, "k": 6})
    a, b = (groth16.prove(pk, cs, w, random.Random(s)) for s in (5, 6))
    assert a.data != b.data and a.public_inputs == b.public_inputs


def test_key_serialization_roundtrip(g16):
    cs, pk, vk = g16
    pk2 = groth16.pk_from_bytes(groth16.pk_to_bytes(pk))
    vk2 = groth16.vk_from_bytes(groth16.vk_to_bytes(vk))
    proof = groth16.prove(pk2, cs, cs.evaluate({"x": 7, "k": 1}), random.Random(7))
    assert groth16.verify(vk2, proof) and groth16.verify(vk, proof)
    with pytest.raises(ValueError):
        groth16.vk_from_bytes(b"garbage")


def test_key_from_other_circuit_is_refused(g16):
    other = ConstraintSystem("other")
    other.output("y", other.mul(other.input("a"), other.input("b")))
    with pytest.raises(DigestMismatchError):
        groth16.prove(g16[1], other, other.evaluate({"a": 2, "b": 3}))


def test_keystore_caches_and_checks_digest(tmp_path):
    cs = small_circuit("ks")
    store = KeyStore(tmp_path)
    pk, vk = store.get(cs, "groth16", random.Random(8))
    assert store.manifest(cs, "groth16")["numPublic"] == 2
    fresh = KeyStore(tmp_path)
    _, vk2 = fresh.get(cs, "groth16", create=False)
    assert groth16.vk_to_bytes(vk2) == groth16.vk_to_bytes(vk)
    with pytest.raises(FileNotFoundError):
        KeyStore(tmp_path / "empty").get(cs, "groth16", create=False)
    # a vk file swapped in from another circuit is detected
    other = ConstraintSystem("ks")
    other.output("y", other.mul(other.input("a"), other.input("b")))
    name = KeyStore.key_name(other, "groth16")
    for path in fresh.paths(KeyStore.key_name(cs, "groth16"))[:2]:
        path.rename(tmp_path / path.name.replace(KeyStore.key_name(cs, "groth16"), name))
    with pytest.raises(DigestMismatchError):
        KeyStore(tmp_path).load(other, "groth16")


def test_backend_names():
    assert get_backend("sound") is groth16 and get_backend(dev.BACKEND_ID) is dev
    with pytest.raises(ValueError):
        get_backend("plonk")
