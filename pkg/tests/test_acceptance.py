"""Acceptance suite: one test per criterion, at the stated tolerance.

Measured figures are collected in RESULTS and written to
acceptance_results.json next to the package root at the end of the session.
ZKCRED_TAMPER_TRIALS and ZKCRED_HYGIENE_VPS shrink the randomized parts for
quick local runs; a reduced run fails the corresponding criterion.
"""

import base64
import dataclasses
import json
import os
import random
import statistics
import time
from pathlib import Path

import pytest

from zkcred.arith.eddsa import eddsa_keygen, eddsa_sign
from zkcred.arith.field import P, to_bytes, to_hex
from zkcred.arith.poseidon import poseidon_hash
from zkcred.backend import UnsatisfiedWitnessError, dev, groth16
from zkcred.circuits import gadgets
from zkcred.circuits.accounting import PRINTED_TOTALS, UNIT_COST, accounting_report, reference_total
from zkcred.circuits.eddsa import EDDSA, eddsa_verify
from zkcred.circuits.polygon import POLYGON, point_in_polygon, polygon_inbound, scale_coordinate
from zkcred.circuits.r1cs import ConstraintSystem
from zkcred.circuits.scenarios import (ScenarioSpec, SlotWitness, assemble_vp_circuit, build_inputs,
                                       dummy_signature, scenario)
from zkcred.credential import AttributeDescriptor, MetaInputs, Schema, issue
from zkcred.encoding import AttributeValue
from zkcred.presentation import (DesignatedVerifier, PresentationError, create_presentation,
                                 designated_presentation, forge_presentation, open_envelope,
                                 verify_presentation)
from zkcred.revocation import (ClientRegistryState, NonRevocationWitness, RevocationRegistry, capacity,
                               rebuild_root)
from zkcred.revocation.registry import BitmapTree

from conftest import World, keypair, load_data

RESULTS = {}
TRIALS = int(os.environ.get("ZKCRED_TAMPER_TRIALS", 100))
HYGIENE_VPS = int(os.environ.get("ZKCRED_HYGIENE_VPS", 200))
BAVARIA = [tuple(v) for v in load_data("bavaria_like_polygon.json")["vertices"]]


@pytest.fixture(scope="module", autouse=True)
def results_file():
    yield
    out = Path(__file__).resolve().parents[1] / "acceptance_results.json"
    out.write_text(json.dumps(RESULTS, indent=2, sort_keys=True) + "\n")


# --- 1 -----------------------------------------------------------------------------

def test_criterion_1_constraint_accounting():
    measured = {}
    for name in ("I", "II", "III", "IV"):
        report = accounting_report(assemble_vp_circuit(scenario(name)), name)
        measured[name] = {"components": report.component_total, "plumbing": report.plumbing,
                          "notes": report.notes}
    RESULTS["1"] = measured
    for name in ("I", "II", "III"):
        assert measured[name]["components"] == PRINTED_TOTALS[name]
    assert measured["IV"]["components"] == reference_total("IV") == 38_675
    assert PRINTED_TOTALS["IV"] - reference_total("IV") == 240
    assert any("38,915" in n and "240" in n for n in measured["IV"]["notes"])


# --- 2 -----------------------------------------------------------------------------

def _cost(build, component):
    cs = ConstraintSystem()
    build(cs)
    return cs.counts()[component]


def test_criterion_2_gadget_counts():
    two = lambda cs: (cs.input("a"), cs.input("b"))
    got = {
        gadgets.POSEIDON: _cost(lambda cs: gadgets.poseidon(cs, two(cs)), gadgets.POSEIDON),
        EDDSA: _cost(lambda cs: eddsa_verify(cs, two(cs), cs.input("m"), (cs.input("rx"), cs.input("ry")),
                                             cs.input("s")), EDDSA),
        gadgets.RANGE: _cost(lambda cs: gadgets.range_lt(cs, *two(cs)), gadgets.RANGE),
        gadgets.DIVMOD: _cost(lambda cs: gadgets.divmod_const(cs, cs.input("a")), gadgets.DIVMOD),
        gadgets.KTH_BIT: _cost(lambda cs: gadgets.extract_kth_bit(cs, *two(cs)), gadgets.KTH_BIT),
        gadgets.SELECTOR: _cost(lambda cs: gadgets.selector(cs, *two(cs), cs.input("d")), gadgets.SELECTOR),
    }

    def polygon(n):
        def build(cs):
            vs = [(cs.input(f"vx[{i}]"), cs.input(f"vy[{i}]")) for i in range(n)]
            polygon_inbound(cs, cs.input("x"), cs.input("y"), vs)
        return _cost(build, POLYGON)

    per_vertex = {n: polygon(n) / n for n in (3, 10, 50)}
    fifty = polygon(50)
    RESULTS["2"] = {"gadgets": got, "polygonPerVertex": per_vertex, "polygon50": fifty}
    assert got == {g: UNIT_COST[g] for g in got}
    assert got[gadgets.POSEIDON] == 240 and got[EDDSA] == 4218 and got[gadgets.KTH_BIT] == 1012
    assert set(per_vertex.values()) == {333}
    assert fifty == 16_650


# --- 3 -----------------------------------------------------------------------------

def test_criterion_3_revocation_arithmetic():
    dense = len(BitmapTree(13).dense_bytes())
    hybrid = ClientRegistryState.for_leaf(13, 123_456, 0.25).stored_bytes()
    RESULTS["3"] = {"capacity13": capacity(13), "capacity18": capacity(18), "denseBytes": dense,
                    "hybridBytes": hybrid}
    assert capacity(13) == 2_064_384
    assert capacity(18) == 66_060_288
    assert abs(dense - 500_000) <= 50_000
    assert abs(hybrid - 120_000) <= 12_000


# --- 4 -----------------------------------------------------------------------------

def _chain(world, length):
    keys = [keypair(world.rng) for _ in range(length - 1)]
    issuers = keys + [world.issuer]
    world.issue(issuer=issuers[0])
    for level in range(1, length):
        world.issue(issuer=issuers[level], binding=keys[level - 1].public, delegatable=True)


def _scenario_world(name, rng, backend):
    world = World(rng, depth=scenario(name).depth, backend=backend)
    if name == "IV":
        _chain(world, 3)
        return world, world.request(chain=3)
    world.issue()
    return world, world.request(reveal=tuple(range(8)) if name == "II" else (0,))


def test_criterion_4_end_to_end(keystore):
    rng = random.Random(4)
    sizes, outcome = {}, {}
    for backend in ("dev", "groth16"):
        for name in ("I", "II", "III", "IV"):
            world, request = _scenario_world(name, rng, backend)
            vp = create_presentation(world.wallet, request, backend=backend, keystore=keystore, rng=rng)
            report = verify_presentation(vp, request, world.policy, keystore=keystore)
            outcome[f"{backend}/{name}"] = {"circuit": vp.spec.name, "valid": report.ok,
                                            "failed": report.failed(), "proofBytes": len(vp.proof)}
            if backend == "groth16":
                sizes[name] = len(vp.proof)
    RESULTS["4"] = outcome
    assert all(o["valid"] for o in outcome.values()), outcome
    assert all(outcome[f"{b}/{n}"]["circuit"] == n for b in ("dev", "groth16") for n in ("I", "II", "III", "IV"))
    assert len(set(sizes.values())) == 1 and sizes["I"] < 1024


# --- 5 -----------------------------------------------------------------------------

TAMPER_CLASSES = ["bad-issuer-signature", "expired", "revoked", "wrong-challenge", "wrong-binding-key",
                  "broken-chain-link", "non-delegatable-intermediary", "unequal-linked-attributes"]
LINK_POSITION = 3
LINK_SPEC = ScenarioSpec("link", ((0, 0),), 13, credentials=2, predicates=(
    {"type": "link", "a": {"cred": 0, "attr": LINK_POSITION}, "b": {"cred": 1, "attr": LINK_POSITION}},))
TAMPER_SCHEMA = Schema("tamper", [AttributeDescriptor(p, f"a{p}", "integer") for p in range(8)])


def _spec_for(cls):
    if cls in ("broken-chain-link", "non-delegatable-intermediary"):
        return scenario("IV")
    if cls == "unequal-linked-attributes":
        return LINK_SPEC
    return scenario("I")


def tamper_inputs(cls, rng, tampered=True):
    """Named circuit inputs for one randomized trial of `cls`; honest when not `tampered`."""
    spec = _spec_for(cls)
    key = lambda: eddsa_keygen(rng.getrandbits(256).to_bytes(32, "little"))
    reg = RevocationRegistry(spec.depth, "tamper")
    now = 1_700_000_000 + rng.randrange(10 ** 8)
    challenge = rng.randrange(P)
    holder = key()
    keys = [holder] + [key() for _ in range(spec.chain)]
    broken = rng.randrange(1, spec.chain) if spec.chain > 1 else None
    attrs = lambda: [rng.getrandbits(60) for _ in range(8)]
    rid = lambda: rng.randrange(reg.capacity)

    creds = []
    for level in range(spec.chain):
        bound = keys[level].public
        delegatable = level > 0
        if tampered and level == broken:
            if cls == "broken-chain-link":
                bound = key().public
            elif cls == "non-delegatable-intermediary":
                delegatable = False
        expires = now + rng.randrange(1, 10 ** 7)
        if tampered and cls == "expired" and level == 0:
            expires = now - rng.randrange(0, 10 ** 7)
        cred = issue(keys[level + 1], TAMPER_SCHEMA, MetaInputs(rid(), 0, bound, expires, delegatable), attrs())
        if tampered and cls == "bad-issuer-signature" and level == 0:
            forged = issue(key(), TAMPER_SCHEMA, MetaInputs(cred.revocation_id, 0, bound, expires, delegatable),
                           [0] * 8)
            cred = dataclasses.replace(cred, signature=forged.signature)
        creds.append(cred)
    if spec.credentials == 2:
        values = attrs()
        values[LINK_POSITION] = creds[0].content[LINK_POSITION]
        if tampered:
            values[LINK_POSITION] = (values[LINK_POSITION] + rng.randrange(1, 1 << 40)) % (1 << 61)
        creds.append(issue(key(), TAMPER_SCHEMA, MetaInputs(rid(), 0, holder.public, now + 10 ** 6), values))

    def witness(cred):
        return reg.witness(cred.revocation_id)

    signed = challenge
    if tampered and cls == "wrong-challenge":
        signed = (challenge + rng.randrange(1, P)) % P
    signer = key() if tampered and cls == "wrong-binding-key" else holder
    holder_sig = eddsa_sign(signer, signed)
    if tampered and cls == "revoked":
        reg.revoke(creds[0].revocation_id)
        revoked = NonRevocationWitness(reg.tree.leaf(creds[0].revocation_id // 252),
                                       reg.tree.path(creds[0].revocation_id // 252), reg.root, reg.version,
                                       creds[0].revocation_id)
        witnesses = [revoked] + [witness(c) for c in creds[1:]]
    else:
        witnesses = [witness(c) for c in creds]
    holder_slots = spec.holder_slots()
    slots = [SlotWitness(c, w, holder_sig if s in holder_slots else None)
             for s, (c, w) in enumerate(zip(creds, witnesses))]
    return spec, build_inputs(spec, slots, challenge, now)


def test_criterion_5_tamper_matrix(keystore):
    rng = random.Random(5)
    table = {}
    for cls in TAMPER_CLASSES:
        spec = _spec_for(cls)
        cs = assemble_vp_circuit(spec)
        g_pk, g_vk = keystore.get(cs, "groth16", rng)
        d_pk, d_vk = dev.setup(cs)
        # control: the untampered sibling of a trial proves and verifies
        _, honest = tamper_inputs(cls, rng, tampered=False)
        w = cs.evaluate(honest)
        assert groth16.verify(g_vk, groth16.prove(g_pk, cs, w, rng)) and dev.verify(d_vk, dev.prove(d_pk, cs, w))

        counts = {"groth16": 0, "dev": 0}
        checks = set()
        for _ in range(TRIALS):
            _, inputs = tamper_inputs(cls, rng)
            values = cs.generate(inputs)
            bad = cs.violations(values, limit=1)
            if bad:
                checks.add(cs.describe(bad[0])["scope"])
            for name, mod, pk, vk in (("groth16", groth16, g_pk, g_vk), ("dev", dev, d_pk, d_vk)):
                try:
                    mod.prove(pk, cs, values, rng)
                    refused = False
                except UnsatisfiedWitnessError:
                    refused = True
                forced = mod.prove(pk, cs, values, rng, force=True)
                if refused and not mod.verify(vk, forced):
                    counts[name] += 1
        table[cls] = {"trials": TRIALS, "rejected": counts, "scopes": sorted(checks)}
    RESULTS["5"] = table
    assert TRIALS >= 100, "reduced trial count"
    for cls, row in table.items():
        assert row["rejected"] == {"groth16": TRIALS, "dev": TRIALS}, (cls, row)


# --- 6 -----------------------------------------------------------------------------

def _oracle_run(build, inputs_list, oracle):
    cs = ConstraintSystem()
    outs = build(cs)
    for i, o in enumerate(outs):
        cs.output(f"o{i}", o)
    mismatches = 0
    for inputs in inputs_list:
        named = cs.evaluate(inputs).named()
        got = tuple(named[f"o{i}"] for i in range(len(outs)))
        mismatches += got != oracle(**inputs)
    return mismatches


def _random_polygon(rng):
    n = rng.randint(3, 12)
    span = rng.choice([8, 64, 1 << 20])
    return [(rng.randrange(span), rng.randrange(span)) for _ in range(n)]


def test_criterion_6_oracle_equivalence():
    rng = random.Random(6)
    n = 1000
    report = {}

    xs = [{"x": rng.choice([rng.getrandbits(16), rng.getrandbits(64), rng.getrandbits(200), 252 * rng.getrandbits(20)])}
          for _ in range(n)]
    report["divmod"] = _oracle_run(lambda cs: gadgets.divmod_const(cs, cs.input("x")), xs,
                                   lambda x: (x // 252, x % 252, 1))

    ks = [{"v": rng.getrandbits(252), "k": rng.randrange(300)} for _ in range(n)]
    report["extractKthBit"] = _oracle_run(lambda cs: [gadgets.extract_kth_bit(cs, cs.input("v"), cs.input("k"))],
                                          ks, lambda v, k: ((v >> k) & 1 if k <= 252 else 0,))

    def pair():
        a = rng.getrandbits(rng.choice([8, 64, 251]))
        b = rng.choice([a, a + 1, max(a - 1, 0), rng.getrandbits(251)]) % (1 << 251)
        return {"a": a, "b": b}
    report["range"] = _oracle_run(lambda cs: [gadgets.range_lt(cs, cs.input("a"), cs.input("b"))],
                                  [pair() for _ in range(n)], lambda a, b: (int(a < b),))
    small = [{"a": rng.getrandbits(63), "b": rng.getrandbits(63)} for _ in range(n)]
    report["less_than64"] = _oracle_run(lambda cs: [gadgets.less_than(cs, cs.input("a"), cs.input("b"), 64)],
                                        small, lambda a, b: (int(a < b),))

    depth = 13

    def merkle_inputs():
        d = {"leaf": rng.randrange(P)}
        for j in range(depth):
            d[f"s[{j}]"], d[f"d[{j}]"] = rng.randrange(P), rng.randrange(2)
        return d

    def merkle_oracle(**d):
        node = d["leaf"]
        for j in range(depth):
            s = d[f"s[{j}]"]
            node = poseidon_hash([s, node] if d[f"d[{j}]"] else [node, s])
        return (node,)
    report["merkle"] = _oracle_run(
        lambda cs: [gadgets.merkle_ascend(cs, cs.input("leaf"), cs.inputs("s", depth), cs.inputs("d", depth))],
        [merkle_inputs() for _ in range(n)], merkle_oracle)

    poly_mismatch, poly_cases = 0, 0
    circuits = {}
    for _ in range(n - 200):
        poly = _random_polygon(rng)
        pts = [rng.choice(poly)] if rng.random() < 0.2 else []
        pts.append((rng.randrange(-2, max(x for x, _ in poly) + 3), rng.randrange(-2, max(y for _, y in poly) + 3)))
        for pt in pts:
            poly_cases += 1
            poly_mismatch += _polygon_gadget(circuits, pt, poly) != int(point_in_polygon(*pt, poly))
    bavaria = [(scale_coordinate(a), scale_coordinate(b)) for a, b in BAVARIA]
    for _ in range(200):
        pt = (scale_coordinate(round(rng.uniform(9, 14), 7)), scale_coordinate(round(rng.uniform(47, 51), 7)))
        poly_cases += 1
        poly_mismatch += _polygon_gadget(circuits, pt, bavaria) != int(point_in_polygon(*pt, bavaria))
    report["polygon"] = poly_mismatch

    replay_mismatch = 0
    for seq in range(20):
        reg, client, revoked = RevocationRegistry(6, f"seq{seq}"), ClientRegistryState(6), set()
        for _ in range(100):
            rid, status = rng.randrange(reg.capacity), rng.choice(["revoked", "valid"])
            reg.set_status(rid, status)
            (revoked.add if status == "revoked" else revoked.discard)(rid)
            if rng.random() < 0.25:
                client.apply_deltas(reg.deltas_since(client.version))
        client.apply_deltas(reg.deltas_since(client.version))
        replay_mismatch += not (client.root == reg.root == rebuild_root(6, revoked))
    report["deltaReplay"] = replay_mismatch
    RESULTS["6"] = {"mismatches": report, "polygonCases": poly_cases, "inputsPerGadget": n}
    assert poly_cases >= n
    assert all(v == 0 for v in report.values()), report


def _polygon_gadget(cache, pt, poly):
    n = len(poly)
    if n not in cache:
        cs = ConstraintSystem()
        vs = [(cs.input(f"vx[{i}]"), cs.input(f"vy[{i}]")) for i in range(n)]
        cs.output("inside", polygon_inbound(cs, cs.input("x"), cs.input("y"), vs))
        cache[n] = cs
    inputs = {"x": pt[0], "y": pt[1]}
    for i, (vx, vy) in enumerate(poly):
        inputs[f"vx[{i}]"], inputs[f"vy[{i}]"] = vx, vy
    return cache[n].evaluate(inputs).named()["inside"]


# --- 7 -----------------------------------------------------------------------------

def test_criterion_7_designated_verifier(keystore):
    rng = random.Random(7)
    table = {}
    for a in (0, 1):
        for b in (0, 1):
            cs = ConstraintSystem()
            gadgets.designated_or(cs, cs.input("a"), cs.input("b"))
            table[f"{a}{b}"] = cs.is_satisfied(cs.generate({"a": a, "b": b}))

    # the same table on the full designated circuit
    world = World(rng, backend="groth16")
    cred = world.issue()
    enc, sig = keypair(rng), keypair(rng)
    request = world.request(designated_verifier=DesignatedVerifier(enc.public, sig.public))
    spec = request.spec(13)
    cs = assemble_vp_circuit(spec)
    holder_ok = eddsa_sign(world.binding, request.challenge)
    verifier_ok = eddsa_sign(sig, request.challenge)
    circuit_table = {}
    for a in (0, 1):
        for b in (0, 1):
            slot = SlotWitness(cred if a else dataclasses.replace(cred, signature=dummy_signature()),
                               world.registry.witness(cred.revocation_id), holder_ok)
            inputs = build_inputs(spec, [slot], request.challenge, request.timestamp, sig.public,
                                  verifier_ok if b else None)
            circuit_table[f"{a}{b}"] = cs.is_satisfied(cs.generate(inputs))

    env = designated_presentation(world.wallet, request, backend="groth16", keystore=keystore, rng=rng)
    opened = verify_presentation(open_envelope(env, enc), request, world.policy, keystore=keystore).ok
    undecryptable = []
    for attempt in (lambda: open_envelope(env, keypair(rng)),
                    lambda: open_envelope(env, sig),
                    lambda: open_envelope({**env, "ciphertext": _flip(env["ciphertext"])}, enc),
                    lambda: open_envelope({**env, "ephemeralPk": keypair(rng).public.to_json()}, enc)):
        try:
            attempt()
            undecryptable.append(False)
        except PresentationError as e:
            undecryptable.append(e.code == "DECRYPTION_FAILED")

    forged = forge_presentation(request, sig, {(0, 0): AttributeValue("short-string", "never issued")},
                                {world.ref: (world.registry.root, 13)}, backend="groth16", keystore=keystore,
                                rng=rng)
    forged_report = verify_presentation(forged, request, world.policy, keystore=keystore)

    base = assemble_vp_circuit(scenario("I"))
    extra = cs.num_constraints - base.num_constraints
    extra_eddsa = cs.counts()[EDDSA] - base.counts()[EDDSA]
    RESULTS["7"] = {"orGadget": table, "circuit": circuit_table, "honestOpens": opened,
                    "undecryptable": undecryptable, "forgedVerifies": forged_report.ok,
                    "addedConstraints": extra, "addedSignatureGadget": extra_eddsa}
    expect = {"00": False, "01": True, "10": True, "11": True}
    assert table == expect and circuit_table == expect
    assert opened and all(undecryptable)
    assert forged_report.ok, forged_report.failed()
    assert extra_eddsa == 4218 and 0 <= extra - 4218 <= 16


def _flip(b64):
    raw = bytearray(base64.b64decode(b64))
    raw[len(raw) // 2] ^= 1
    return base64.b64encode(bytes(raw)).decode()


# --- 8 -----------------------------------------------------------------------------

def test_criterion_8_performance(keystore):
    rng = random.Random(8)
    world, request = _scenario_world("I", rng, "groth16")
    cs = assemble_vp_circuit(scenario("I"))
    t = time.perf_counter()
    keystore.get(cs, "groth16", rng)
    setup_s = time.perf_counter() - t
    prove_s = []
    for _ in range(3):
        t = time.perf_counter()
        vp = create_presentation(world.wallet, request, backend="groth16", keystore=keystore, rng=rng)
        prove_s.append(time.perf_counter() - t)
    verify_ms = []
    for _ in range(20):
        t = time.perf_counter()
        ok = verify_presentation(vp, request, world.policy, keystore=keystore).ok
        verify_ms.append(1000 * (time.perf_counter() - t))
        assert ok
    t = time.perf_counter()
    assemble_vp_circuit(ScenarioSpec("IV-timing", ((0, 0),), 13, chain=3))
    synth_s = time.perf_counter() - t
    RESULTS["8"] = {"setupOrLoadSeconds": setup_s, "presentSeconds": prove_s,
                    "verifyMsMedian": statistics.median(verify_ms), "verifyMsMax": max(verify_ms),
                    "synthesisIVSeconds": synth_s,
                    "referenceDeviceFigures": "300 ms laptop / 6 s Raspberry Pi prove; context only"}
    assert max(prove_s) <= 30
    assert statistics.median(verify_ms) <= 50
    assert synth_s <= 5


# --- 9 -----------------------------------------------------------------------------

def _encodings(v):
    v %= P
    le, be = to_bytes(v), v.to_bytes(32, "big")
    texts = {le.hex(), be.hex(), to_hex(v).removeprefix("0x")}
    if v >= 10 ** 9:
        texts.add(str(v))
    return {le, be}, texts


def _scan(blobs, text, values):
    """Labels of values whose encodings occur inside one blob or in the text."""
    hits = []
    for label, v in values:
        raws, texts = _encodings(v)
        if any(r in b for r in raws for b in blobs) or any(t in text for t in texts):
            hits.append(label)
    return hits


def test_criterion_9_zero_knowledge_hygiene(keystore):
    rng = random.Random(9)
    leaks, coincidences, control = [], [], 0
    for i in range(HYGIENE_VPS):
        world = World(rng, backend="groth16")
        cred = world.issue(rid=rng.randrange(10 ** 5, 10 ** 6))
        request = world.request(reveal=(0,))
        vp = create_presentation(world.wallet, request, backend="groth16", keystore=keystore, rng=rng)
        doc = json.dumps(vp.to_json())
        # each public value is scanned on its own so no match can straddle two values
        blob = [vp.proof, base64.b64decode(vp.to_json()["proof"])]
        blob += [to_bytes(x) for x in vp.publics.values()] + [x.to_bytes(32, "big") for x in vp.publics.values()]
        text = doc.lower()
        holder = eddsa_sign(world.binding, request.challenge)
        hidden = [("binding.x", cred.binding_pk.x), ("binding.y", cred.binding_pk.y),
                  ("issuer.sig.R.x", cred.signature.R.x), ("issuer.sig.R.y", cred.signature.R.y),
                  ("issuer.sig.S", cred.signature.S), ("holder.sig.R.x", holder.R.x),
                  ("holder.sig.R.y", holder.R.y), ("holder.sig.S", holder.S),
                  ("revocation.id", cred.revocation_id), ("content_root", cred.content_root),
                  ("meta_root", cred.meta_root)]
        hidden += [(f"leaf[{p}]", cred.content[p]) for p in range(1, 8)]
        # a small hidden value (an age, say) can equal a small public one such as the leaf index;
        # that is the same number, not a leak, but the proof bytes are still scanned for it.
        # a large hidden value equal to a public input stays a leak
        public = {x % P for x in vp.publics.values()}
        same = [(label, v) for label, v in hidden if v % P < 2 ** 32 and v % P in public]
        coincidences += [(i, label) for label, _ in same]
        found = _scan(blob, text, [h for h in hidden if h not in same]) + _scan(blob[:2], "", same)
        for p, raw in cred.raw_attributes.items():
            if p != 0 and isinstance(raw.payload, str) and len(raw.payload) >= 8 and raw.payload.lower() in text:
                found.append(f"raw[{p}]")
        leaks += [(i, f) for f in found]
        # the scanner does see what is meant to be public
        control += bool(_scan(blob, text, [("leaf[0]", cred.content[0])]))
    RESULTS["9"] = {"presentations": HYGIENE_VPS, "leaks": leaks, "scannerControlHits": control,
                    "publicCoincidences": coincidences}
    assert HYGIENE_VPS >= 200, "reduced presentation count"
    assert control == HYGIENE_VPS
    assert leaks == []

