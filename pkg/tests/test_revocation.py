import pytest

from zkcred.revocation import (BITS_PER_LEAF, ClientRegistryState, RegistryClient, RegistryClientError,
                               RegistryError, RegistryService, RegistryStore, RevocationRegistry, RevokedError,
                               SyncError, capacity, hybrid_sync_plan, rebuild_root, serve_in_thread,
                               sync_client_state, witness_from_json, witness_to_json)
from zkcred.revocation.registry import BitmapTree

from conftest import keypair


def test_capacity_formula():
    assert capacity(13) == 2 ** 13 * 252 == 2_064_384
    assert capacity(18) == 66_060_288


def test_witness_and_revoke(rng):
    reg = RevocationRegistry(6)
    rid = rng.randrange(reg.capacity)
    w = reg.witness(rid)
    assert w.verify() and w.root == reg.root
    reg.revoke(rid)
    with pytest.raises(RevokedError):
        reg.witness(rid)
    assert not w.verify(reg.root)
    neighbour = rid ^ 1
    assert reg.witness(neighbour).verify()


def test_witness_json_roundtrip():
    reg = RevocationRegistry(5)
    w = reg.witness(300)
    assert witness_from_json(witness_to_json(w)) == w


def test_unrevoke_policy():
    reg = RevocationRegistry(4, allow_unrevoke=False)
    reg.revoke(3)
    with pytest.raises(RegistryError):
        reg.set_status(3, "valid")


def test_root_history_and_versions():
    reg = RevocationRegistry(4)
    r0 = reg.root
    reg.revoke(1, timestamp=100)
    reg.revoke(2, timestamp=200)
    assert reg.version == 2 and reg.version_of(r0) == 0
    assert reg.superseded_at(0) == 100 and reg.superseded_at(1) == 200 and reg.superseded_at(2) is None


def test_dense_serialization_roundtrip(rng):
    t = BitmapTree(8)
    for _ in range(50):
        t.set_bit(rng.randrange(256 * BITS_PER_LEAF), False)
    data = t.dense_bytes()
    assert len(data) == (2 ** 9 - 1) * 32
    assert BitmapTree.from_dense_bytes(8, data).root == t.root


def test_delta_replay_matches_rebuild(rng):
    reg = RevocationRegistry(5)
    client = ClientRegistryState(5)
    revoked = set()
    for _ in range(30):
        rid = rng.randrange(reg.capacity)
        status = rng.choice(["revoked", "valid"])
        reg.set_status(rid, status)
        (revoked.add if status == "revoked" else revoked.discard)(rid)
        if rng.random() < 0.3:
            client.apply_deltas(reg.deltas_since(client.version))
            assert client.root == reg.root
    client.apply_deltas(reg.deltas_since(client.version))
    assert client.root == reg.root == rebuild_root(5, revoked)


def test_delta_gap_is_refused():
    reg = RevocationRegistry(4)
    reg.revoke(1)
    reg.revoke(2)
    with pytest.raises(SyncError):
        ClientRegistryState(4).apply_deltas(reg.deltas_since(1))


def test_hybrid_plan_sizes():
    plan = hybrid_sync_plan(13, 0.25)
    assert plan.stored_nodes == 2 ** 12 - 1
    assert plan.stored_nodes * 32 == 131_040
    # the other quarter subtrees and the opposite half are fetched as roots only
    assert plan.fetched == [(11, 1), (11, 2), (11, 3), (12, 1)]


def test_subtree_client_witness_matches_full(rng):
    reg = RevocationRegistry(8)
    for _ in range(40):
        reg.revoke(rng.randrange(reg.capacity))
    rid = next(r for r in range(rng.randrange(1000), reg.capacity) if reg.status(r))
    service = RegistryService()
    service.add(reg, keypair(rng).public)
    client = RegistryClient.local(service)
    state = ClientRegistryState.for_leaf(8, rid, 0.25)
    sync_client_state(client, reg.registry_id, state)
    assert state.stored_bytes() == (2 ** 7 - 1) * 32
    assert state.witness(rid) == reg.witness(rid)


def test_store_recovers_after_restart(tmp_path, rng):
    reg = RevocationRegistry(6, "r")
    store = RegistryStore(tmp_path, snapshot_every=4)
    store.create(reg, reg.descriptor())
    for i in range(10):
        store.append(reg, reg.revoke(rng.randrange(reg.capacity)))
    again = store.load()
    assert again.root == reg.root and again.version == reg.version
    assert again.root_history == reg.root_history


def test_http_service_signed_updates(rng):
    issuer = keypair(rng)
    reg = RevocationRegistry(6, "svc")
    service = RegistryService()
    service.add(reg, issuer.public)
    server = serve_in_thread(service)
    try:
        client = RegistryClient.http(f"http://127.0.0.1:{server.server_address[1]}")
        client.post_status("svc", issuer, [(5, "revoked")])
        assert client.root("svc") == {"root": reg.root, "version": 1, "depth": 6}
        with pytest.raises(RegistryClientError) as e:
            client.post_status("svc", keypair(rng), [(6, "revoked")])
        assert e.value.code == "BAD_SIGNATURE"
        with pytest.raises(RegistryClientError) as e:
            client.post_status("svc", issuer, [(6, "revoked")], version=1)
        assert e.value.code == "STALE_UPDATE"
        with pytest.raises(RegistryClientError) as e:
            client.root("nope")
        assert e.value.code == "UNKNOWN_REGISTRY"
        state = sync_client_state(client, "svc", ClientRegistryState(6))
        assert state.root == reg.root
    finally:
        server.shutdown()
