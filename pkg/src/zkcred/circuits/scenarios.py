"""Presentation circuits assembled from per-credential checks.

Credentials occupy numbered slots.  With a chain of length n, slots 0..n-1
hold the chain with the leaf credential in slot 0 and the top-of-chain
credential in slot n-1; further independently held credentials (used for
linking and multi-credential predicates) follow.  Credential k of a spec
therefore maps to slot 0 for k = 0 and to slot n - 1 + k otherwise.

Per slot the circuit enforces

    integrity       meta subtree (7 hashes), root = H(meta_root, content_root),
                    issuer signature over the root
    non-expiration  timestamp < expiration
    non-revocation  (q, r) = divmod(revocation_id, 252), bits of q address a
                    registry leaf whose ascent equals the public registry root,
                    bit r of that leaf is 1
    holder binding  signature over the challenge under the binding key
                    (leaf and independently held credentials only)
    delegation      delegatable = 1 (non-leaf chain levels)

Attribute disclosure walks the 16-leaf credential tree from a public index
(content position p sits at index 8 + p) with private siblings and requires
the result to equal the integrity root.  When every content position of a
credential is revealed, the whole content subtree is recomputed from the
public leaves instead: the leftmost path doubles as the disclosure path of
index 8, whose sibling at the top is the meta root.

Chain links compare Poseidon fingerprints H(x, y) of the issuer key of level
i and the binding key of level i + 1.  Only the top issuer key is public.

In designated-verifier mode every check becomes a bit instead of a hard
assertion; their conjunction a is combined with the validity bit b of a
verifier signature over the challenge through a + b - a*b = 1.
"""

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from . import gadgets
from .eddsa import EDDSA, eddsa_verify
from .polygon import offset_lc, polygon_inbound
from .r1cs import LC, ConstraintSystem, as_lc

META_SLOTS = 8
CONTENT_SLOTS = 8
PUBLIC_META = (1, 4)           # schema hash, registry ref
BINDING_X, BINDING_Y, EXPIRATION, DELEGATABLE, REVOCATION_ID = 2, 3, 5, 6, 0

MERKLE_ROOT = "Merkle root"
CHAIN_LINK = "Chain link"
DELEGATION = "Delegation flag"
ATTRIBUTE_LINK = "Attribute link"
DESIGNATED = "Designated-verifier OR"


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class Predicate:
    """A declarative predicate; `body` is its canonical JSON descriptor.

    Descriptor forms:

        {"type": "expr", "expr": node, "expect": 1}
        {"type": "polygon", "x": node, "y": node, "vertices": [[x, y], ...], "expect": 1}
        {"type": "link", "a": {"cred": 0, "attr": 4}, "b": {"cred": 1, "attr": 2}}

    with node one of {"attr": p, "cred": k}, {"const": v} or
    {"op": o, "args": [node, ...]} for o in + - * < <= > >= = and or not.
    Comparisons use 252-bit comparators, so their operands must be
    non-negative and below 2**251 (dates, integers, packed strings).
    Constants and polygon vertices become public inputs, so the circuit
    depends only on the shape of the descriptor.
    """
    body: str

    @classmethod
    def from_json(cls, doc: dict) -> "Predicate":
        if doc.get("type") not in ("expr", "polygon", "link"):
            raise SpecError(f"unknown predicate type {doc.get('type')!r}")
        return cls(json.dumps(doc, sort_keys=True, separators=(",", ":")))

    def to_json(self) -> dict:
        return json.loads(self.body)

    @property
    def kind(self) -> str:
        return self.to_json()["type"]


@dataclass(frozen=True)
class ScenarioSpec:
    name: str = "custom"
    # (credential, content position) pairs
    revealed: Tuple[Tuple[int, int], ...] = ((0, 0),)
    depth: int = 13
    chain: int = 1
    credentials: int = 1
    predicates: Tuple[Predicate, ...] = ()
    designated: bool = False
    binding_commitment: bool = False

    def __post_init__(self):
        revealed = tuple(sorted({(0, r) if isinstance(r, int) else (int(r[0]), int(r[1]))
                                 for r in self.revealed}))
        object.__setattr__(self, "revealed", revealed)
        object.__setattr__(self, "predicates", tuple(
            p if isinstance(p, Predicate) else Predicate.from_json(p) for p in self.predicates))
        self.validate()

    def validate(self):
        if self.chain < 1 or self.credentials < 1:
            raise SpecError("chain length and credential count must be at least 1")
        if not 1 <= self.depth <= 24:
            raise SpecError("registry depth must be in 1..24")
        for cred, pos in self.revealed:
            if not 0 <= cred < self.credentials:
                raise SpecError(f"revealed credential {cred} not in spec")
            if not 0 <= pos < CONTENT_SLOTS:
                raise SpecError(f"content position {pos} outside 0..{CONTENT_SLOTS - 1}")
        for pred in self.predicates:
            for cred, pos in _attr_refs(pred.to_json()):
                if not 0 <= cred < self.credentials or not 0 <= pos < CONTENT_SLOTS:
                    raise SpecError(f"predicate references missing attribute {cred}:{pos}")
            doc = pred.to_json()
            if doc["type"] == "polygon" and len(doc.get("vertices", [])) < 3:
                raise SpecError("a polygon needs at least three vertices")

    @property
    def slots(self) -> int:
        return self.chain + self.credentials - 1

    def slot_of(self, cred: int) -> int:
        return 0 if cred == 0 else self.chain - 1 + cred

    def holder_slots(self) -> List[int]:
        return [self.slot_of(k) for k in range(self.credentials)]

    def public_issuer_slots(self) -> List[int]:
        return [self.chain - 1] + list(range(self.chain, self.slots))

    def revealed_positions(self, cred: int) -> List[int]:
        return [p for c, p in self.revealed if c == cred]

    def full_disclosure(self, cred: int) -> bool:
        return len(self.revealed_positions(cred)) == CONTENT_SLOTS

    def to_json(self) -> dict:
        return {"name": self.name, "revealed": [list(r) for r in self.revealed], "depth": self.depth,
                "chain": self.chain, "credentials": self.credentials,
                "predicates": [p.to_json() for p in self.predicates],
                "designated": self.designated, "bindingCommitment": self.binding_commitment}

    @classmethod
    def from_json(cls, doc: dict) -> "ScenarioSpec":
        return cls(doc.get("name", "custom"), tuple(tuple(r) for r in doc.get("revealed", [[0, 0]])),
                   int(doc.get("depth", 13)), int(doc.get("chain", 1)), int(doc.get("credentials", 1)),
                   tuple(doc.get("predicates", ())), bool(doc.get("designated", False)),
                   bool(doc.get("bindingCommitment", False)))


SCENARIOS: Dict[str, ScenarioSpec] = {
    "I": ScenarioSpec("I", ((0, 0),), 13),
    "II": ScenarioSpec("II", tuple((0, p) for p in range(CONTENT_SLOTS)), 13),
    "III": ScenarioSpec("III", ((0, 0),), 18),
    "IV": ScenarioSpec("IV", ((0, 0),), 13, chain=3),
}


def scenario(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise SpecError(f"unknown scenario {name!r}; expected one of {sorted(SCENARIOS)}") from None


def _attr_refs(node) -> List[Tuple[int, int]]:
    if isinstance(node, dict):
        out = []
        if "attr" in node:
            out.append((int(node.get("cred", 0)), int(node["attr"])))
        for k, v in node.items():
            if k != "attr":
                out += _attr_refs(v)
        return out
    if isinstance(node, list):
        return [r for x in node for r in _attr_refs(x)]
    return []


# --- input names ----------------------------------------------------------------

def tree_depth() -> int:
    return (META_SLOTS + CONTENT_SLOTS).bit_length() - 1


def name(slot: int, item: str) -> str:
    return f"cred{slot}.{item}"


# --- assembly ---------------------------------------------------------------------

class _Checks:
    """Hard assertions, or reified bits in designated mode."""

    def __init__(self, cs: ConstraintSystem, designated: bool):
        self.cs, self.designated, self.bits = cs, designated, []

    def bit(self, b, tag: str):
        if self.designated:
            self.bits.append(as_lc(b))
        else:
            self.cs.assert_true(b, tag)

    def equal(self, x, y, tag: str):
        if self.designated:
            self.bits.append(gadgets.is_equal(self.cs, x, y))
        else:
            self.cs.enforce_equal(x, y, tag)


class _Builder:
    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.cs = ConstraintSystem(f"vp-{spec.name}")
        self.checks = _Checks(self.cs, spec.designated)
        self.roots: Dict[int, LC] = {}
        self.meta: Dict[int, List[LC]] = {}
        self.issuers: Dict[int, Tuple[LC, LC]] = {}
        self.holder_s: Dict[int, LC] = {}
        self.attrs: Dict[Tuple[int, int], LC] = {}

    def build(self) -> ConstraintSystem:
        cs, spec = self.cs, self.spec
        self.challenge = cs.input("challenge", public=True)
        self.timestamp = cs.input("timestamp", public=True)
        for s in range(spec.slots):
            self._credential(s)
        for i in range(spec.chain - 1):
            with cs.scope(f"chain{i}"):
                low = gadgets.poseidon(cs, list(self.issuers[i]))
                up = gadgets.poseidon(cs, [self.meta[i + 1][BINDING_X], self.meta[i + 1][BINDING_Y]])
                self.checks.equal(low, up, CHAIN_LINK)
        for cred, pos in spec.revealed:
            self.attribute(spec.slot_of(cred), pos)
        for k, pred in enumerate(spec.predicates):
            with cs.scope(f"pred{k}"):
                self._predicate(k, pred.to_json())
        if spec.binding_commitment:
            m = self.meta[0]
            cs.output("binding_commitment",
                      gadgets.poseidon(cs, [m[BINDING_X], m[BINDING_Y], self.challenge]))
        if spec.designated:
            self._designated()
        cs.spec = spec
        return cs

    def _credential(self, s: int):
        cs, spec = self.cs, self.spec
        with cs.scope(f"cred{s}"):
            meta = [cs.input(name(s, f"meta[{i}]"), public=i in PUBLIC_META) for i in range(META_SLOTS)]
            self.meta[s] = meta
            public_issuer = s in spec.public_issuer_slots()
            issuer = (cs.input(name(s, "issuer.x"), public_issuer), cs.input(name(s, "issuer.y"), public_issuer))
            self.issuers[s] = issuer
            with cs.scope("integrity"):
                meta_root = _subtree(cs, meta)
                cred = self._cred_index(s)
                if cred is not None and spec.full_disclosure(cred):
                    root = self._full_content(s, meta_root)
                else:
                    root = gadgets.poseidon(cs, [meta_root, cs.input(name(s, "content_root"))])
                self.roots[s] = root
                sig = [cs.input(name(s, k)) for k in ("sig.R8x", "sig.R8y", "sig.S")]
                self.checks.bit(eddsa_verify(cs, issuer, root, sig[:2], sig[2]), EDDSA)
            with cs.scope("non-expiration"):
                self.checks.bit(gadgets.range_lt(cs, self.timestamp, meta[EXPIRATION]), gadgets.RANGE)
            with cs.scope("non-revocation"):
                self._revocation(s, meta[REVOCATION_ID])
            if s in spec.holder_slots():
                with cs.scope("holder-binding"):
                    hs = [cs.input(name(s, k)) for k in ("holder.R8x", "holder.R8y", "holder.S")]
                    self.holder_s[s] = hs[2]
                    pk = (meta[BINDING_X], meta[BINDING_Y])
                    self.checks.bit(eddsa_verify(cs, pk, self.challenge, hs[:2], hs[2]), EDDSA)
            if 0 < s < spec.chain:
                with cs.scope("delegation"):
                    self.checks.equal(meta[DELEGATABLE], 1, DELEGATION)

    def _cred_index(self, s: int) -> Optional[int]:
        if s == 0:
            return 0
        if s >= self.spec.chain:
            return s - self.spec.chain + 1
        return None

    def _revocation(self, s: int, rid: LC):
        cs = self.cs
        q, r, ok = gadgets.divmod_const(cs, rid)
        self.checks.bit(ok, gadgets.DIVMOD)
        path_bits = gadgets.num2bits(cs, q, self.spec.depth)
        leaf = cs.input(name(s, "rev.leaf"))
        siblings = cs.inputs(name(s, "rev.siblings"), self.spec.depth)
        root = gadgets.merkle_ascend(cs, leaf, siblings, path_bits)
        self.checks.equal(root, cs.input(name(s, "rev.root"), public=True), MERKLE_ROOT)
        self.checks.bit(gadgets.extract_kth_bit(cs, leaf, r), gadgets.KTH_BIT)

    def _full_content(self, s: int, meta_root: LC) -> LC:
        """Recompute the content subtree from public leaves along the index-8 path."""
        cs = self.cs
        leaves = [cs.input(name(s, f"leaf[{p}]"), public=True) for p in range(CONTENT_SLOTS)]
        for p, lc in enumerate(leaves):
            self.attrs[(s, p)] = lc
        anchor = cs.input(name(s, "anchor"), public=True)
        bits = gadgets.num2bits(cs, anchor, tree_depth())
        # hashes off the leftmost path are its siblings; None marks the path node
        siblings, level = [], list(leaves)
        while len(level) > 1:
            siblings.append(level[1])
            rest = level[2:]
            level = [None] + [gadgets.poseidon(cs, [rest[i], rest[i + 1]]) for i in range(0, len(rest), 2)]
        siblings.append(meta_root)
        return gadgets.merkle_ascend(cs, leaves[0], siblings, bits)

    def attribute(self, s: int, pos: int) -> LC:
        """Leaf `pos` of slot s, proven against its integrity root (memoized)."""
        key = (s, pos)
        if key in self.attrs:
            return self.attrs[key]
        cs = self.cs
        cred = self._cred_index(s)
        revealed = cred is not None and pos in self.spec.revealed_positions(cred)
        with cs.scope(f"cred{s}/disclosure{pos}"):
            leaf = cs.input(name(s, f"leaf[{pos}]" if revealed else f"hidden[{pos}]"), public=revealed)
            index = cs.input(name(s, f"index[{pos}]"), public=True)
            bits = gadgets.num2bits(cs, index, tree_depth())
            siblings = cs.inputs(name(s, f"path[{pos}]"), tree_depth())
            root = gadgets.merkle_ascend(cs, leaf, siblings, bits)
            self.checks.equal(root, self.roots[s], MERKLE_ROOT)
        self.attrs[key] = leaf
        return leaf

    # predicates --------------------------------------------------------------

    def _predicate(self, k: int, doc: dict):
        cs = self.cs
        self._const_count = 0
        if doc["type"] == "expr":
            cs.output(f"pred{k}", self._expr(k, doc["expr"]))
        elif doc["type"] == "polygon":
            x = offset_lc(self._expr(k, doc["x"]))
            y = offset_lc(self._expr(k, doc["y"]))
            n = len(doc["vertices"])
            vx = cs.inputs(f"pred{k}.vx", n, public=True)
            vy = cs.inputs(f"pred{k}.vy", n, public=True)
            cs.output(f"pred{k}", polygon_inbound(cs, x, y, list(zip(vx, vy))))
        else:
            a, b = doc["a"], doc["b"]
            va = self.attribute(self.spec.slot_of(int(a.get("cred", 0))), int(a["attr"]))
            vb = self.attribute(self.spec.slot_of(int(b.get("cred", 0))), int(b["attr"]))
            r = gadgets.poseidon(cs, [self.holder_s[0]])
            self.checks.equal(gadgets.poseidon(cs, [va, r]), gadgets.poseidon(cs, [vb, r]), ATTRIBUTE_LINK)

    def _expr(self, k: int, node) -> LC:
        cs = self.cs
        if "attr" in node:
            return self.attribute(self.spec.slot_of(int(node.get("cred", 0))), int(node["attr"]))
        if "const" in node:
            j = self._const_count
            self._const_count += 1
            return cs.input(f"pred{k}.const[{j}]", public=True)
        op = node["op"]
        args = [self._expr(k, a) for a in node["args"]]
        if op == "+":
            return sum(args[1:], args[0])
        if op == "-":
            return args[0] - args[1] if len(args) == 2 else -args[0]
        if op == "*":
            acc = args[0]
            for a in args[1:]:
                acc = cs.mul(acc, a)
            return acc
        if op == "<":
            return gadgets.range_lt(cs, args[0], args[1])
        if op == ">":
            return gadgets.range_lt(cs, args[1], args[0])
        if op == "<=":
            return 1 - gadgets.range_lt(cs, args[1], args[0])
        if op == ">=":
            return 1 - gadgets.range_lt(cs, args[0], args[1])
        if op == "=":
            return gadgets.is_equal(cs, args[0], args[1])
        if op == "and":
            return gadgets.and_all(cs, args)
        if op == "or":
            return gadgets.or_(cs, args[0], args[1])
        if op == "not":
            return 1 - args[0]
        raise SpecError(f"unknown operator {op!r}")

    def _designated(self):
        cs = self.cs
        with cs.scope("designated"):
            a = gadgets.and_all(cs, self.checks.bits)
            vpk = (cs.input("verifier.x", public=True), cs.input("verifier.y", public=True))
            vs = [cs.input(k) for k in ("verifier.R8x", "verifier.R8y", "verifier.S")]
            b = eddsa_verify(cs, vpk, self.challenge, vs[:2], vs[2])
            gadgets.designated_or(cs, a, b)
            cs.tags[cs.num_constraints - 1] = DESIGNATED


def _subtree(cs: ConstraintSystem, leaves: Sequence[LC]) -> LC:
    level = list(leaves)
    while len(level) > 1:
        level = [gadgets.poseidon(cs, [level[i], level[i + 1]]) for i in range(0, len(level), 2)]
    return level[0]


@lru_cache(maxsize=32)
def assemble_vp_circuit(spec: ScenarioSpec) -> ConstraintSystem:
    """Build (and cache) the presentation circuit for a spec."""
    if isinstance(spec, str):
        spec = scenario(spec)
    return _Builder(spec).build()


# --- witness inputs ---------------------------------------------------------------

@dataclass
class SlotWitness:
    """Everything the prover knows about the credential in one slot."""
    credential: object                  # credential.Credential
    revocation: object                  # revocation.NonRevocationWitness
    holder_signature: object = None     # Signature over the challenge, holder slots only


def dummy_signature():
    """A well-formed signature that verifies under no key (S = 0, R8 = base point)."""
    from ..arith.babyjub import BASE8
    from ..arith.eddsa import Signature
    return Signature(BASE8, 0)


def _sig_inputs(prefix: str, sig) -> Dict[str, int]:
    return {f"{prefix}.R8x": sig.R[0], f"{prefix}.R8y": sig.R[1], f"{prefix}.S": sig.S}


def predicate_publics(spec: ScenarioSpec) -> Dict[str, int]:
    """Public constants and polygon vertices, in the builder's traversal order."""
    from ..encoding import encode_leaf
    from .polygon import scale_coordinate

    out: Dict[str, int] = {}
    for k, pred in enumerate(spec.predicates):
        doc = pred.to_json()
        consts: List[int] = []

        def walk(node):
            if "attr" in node:
                return
            if "const" in node:
                v = node["const"]
                consts.append(encode_leaf(node["kind"], v) if "kind" in node else int(v))
                return
            for a in node["args"]:
                walk(a)

        if doc["type"] == "expr":
            walk(doc["expr"])
        elif doc["type"] == "polygon":
            walk(doc["x"])
            walk(doc["y"])
            for i, (x, y) in enumerate(doc["vertices"]):
                out[f"pred{k}.vx[{i}]"] = scale_coordinate(x)
                out[f"pred{k}.vy[{i}]"] = scale_coordinate(y)
        for j, v in enumerate(consts):
            out[f"pred{k}.const[{j}]"] = v
    return out


def build_inputs(spec: ScenarioSpec, slots: Sequence[SlotWitness], challenge: int, timestamp: int,
                 verifier_pk=None, verifier_signature=None) -> Dict[str, int]:
    """Map a prover's data onto the named circuit inputs of `spec`.

    Inputs for every content position are supplied; the circuit reads only
    the ones it declares.
    """
    if len(slots) != spec.slots:
        raise SpecError(f"spec needs {spec.slots} credentials, got {len(slots)}")
    inputs: Dict[str, int] = {"challenge": challenge, "timestamp": timestamp}
    first = META_SLOTS
    for s, sw in enumerate(slots):
        cred, rev = sw.credential, sw.revocation
        for i, v in enumerate(cred.meta):
            inputs[name(s, f"meta[{i}]")] = v
        inputs[name(s, "issuer.x")], inputs[name(s, "issuer.y")] = cred.issuer_pk[0], cred.issuer_pk[1]
        inputs[name(s, "content_root")] = cred.content_root
        inputs.update(_sig_inputs(name(s, "sig"), cred.signature))
        inputs[name(s, "anchor")] = first
        for p, v in enumerate(cred.content):
            inputs[name(s, f"leaf[{p}]")] = v
            inputs[name(s, f"hidden[{p}]")] = v
            inputs[name(s, f"index[{p}]")] = first + p
            for j, sib in enumerate(cred.content_path(p)[0]):
                inputs[name(s, f"path[{p}][{j}]")] = sib
        inputs[name(s, "rev.leaf")] = rev.leaf_value
        inputs[name(s, "rev.root")] = rev.root
        for j, sib in enumerate(rev.path.siblings):
            inputs[name(s, f"rev.siblings[{j}]")] = sib
        if s in spec.holder_slots():
            sig = sw.holder_signature if sw.holder_signature is not None else dummy_signature()
            inputs.update(_sig_inputs(name(s, "holder"), sig))
    inputs.update(predicate_publics(spec))
    if spec.designated:
        if verifier_pk is None:
            raise SpecError("designated-verifier spec needs the verifier signing key")
        inputs["verifier.x"], inputs["verifier.y"] = verifier_pk[0], verifier_pk[1]
        sig = verifier_signature if verifier_signature is not None else dummy_signature()
        inputs.update(_sig_inputs("verifier", sig))
    return inputs
