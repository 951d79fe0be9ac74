import random

import pytest

from zkcred.arith.eddsa import eddsa_sign
from zkcred.arith.field import P
from zkcred.arith.poseidon import poseidon_hash
from zkcred.circuits import gadgets
from zkcred.circuits.eddsa import EDDSA, eddsa_verify
from zkcred.circuits.r1cs import ConstraintSystem, ConstraintViolation, MissingInputError

from conftest import keypair


def _run(build, **inputs):
    cs = ConstraintSystem()
    out = build(cs)
    cs.gadget_constraints = cs.num_constraints  # before the output binding
    if out is not None:
        cs.output("out", out)
    w = cs.evaluate(inputs)
    return cs, w


def test_poseidon_gadget_matches_native(rng):
    for n in (1, 2, 5, 16):
        xs = [rng.randrange(P) for _ in range(n)]
        cs, w = _run(lambda cs: gadgets.poseidon(cs, cs.inputs("x", n)),
                     **{f"x[{i}]": v for i, v in enumerate(xs)})
        assert w.named()["out"] == poseidon_hash(xs)
    assert cs.counts()  # billed to the Poseidon component
    cs2 = ConstraintSystem()
    gadgets.poseidon(cs2, cs2.inputs("x", 2))
    assert cs2.num_constraints == 240


def test_num2bits_roundtrip(rng):
    x = rng.getrandbits(64)
    cs, w = _run(lambda cs: gadgets.bits2num(gadgets.num2bits(cs, cs.input("x"), 64)), x=x)
    assert w.named()["out"] == x and cs.gadget_constraints == 64
    with pytest.raises(ConstraintViolation):
        _run(lambda cs: gadgets.bits2num(gadgets.num2bits(cs, cs.input("x"), 8)), x=256)


@pytest.mark.parametrize("seed", range(3))
def test_comparators(seed):
    rng = random.Random(seed)
    for _ in range(50):
        a, b = rng.getrandbits(250), rng.getrandbits(250)
        if rng.random() < 0.2:
            b = a
        _, w = _run(lambda cs: gadgets.range_lt(cs, cs.input("a"), cs.input("b")), a=a, b=b)
        assert w.named()["out"] == int(a < b)


def test_unit_costs():
    for fn, cost in ((lambda cs: gadgets.range_lt(cs, cs.input("a"), cs.input("b")), 252),
                     (lambda cs: gadgets.divmod_const(cs, cs.input("a")), 252),
                     (lambda cs: gadgets.extract_kth_bit(cs, cs.input("a"), cs.input("b")), 1012),
                     (lambda cs: gadgets.selector(cs, cs.input("a"), cs.input("b"), cs.input("c")), 5)):
        cs = ConstraintSystem()
        fn(cs)
        assert cs.num_constraints == cost


def test_divmod_and_kth_bit(rng):
    for _ in range(30):
        x = rng.getrandbits(24)
        _, w = _run(lambda cs: sum(gadgets.divmod_const(cs, cs.input("x"))[:2], start=gadgets.LC()) , x=x)
        assert w.named()["out"] == x // 252 + x % 252
        v, k = rng.getrandbits(252), rng.randrange(260)
        _, w = _run(lambda cs: gadgets.extract_kth_bit(cs, cs.input("v"), cs.input("k")), v=v, k=k)
        assert w.named()["out"] == ((v >> k) & 1 if k < 253 else 0)


def test_merkle_ascend(rng):
    leaf, sibs = rng.randrange(P), [rng.randrange(P) for _ in range(4)]
    dirs = [rng.randrange(2) for _ in range(4)]
    node = leaf
    for s, d in zip(sibs, dirs):
        node = poseidon_hash([s, node] if d else [node, s])
    inputs = {"leaf": leaf, **{f"s[{i}]": v for i, v in enumerate(sibs)}, **{f"d[{i}]": v for i, v in enumerate(dirs)}}
    cs, w = _run(lambda cs: gadgets.merkle_ascend(cs, cs.input("leaf"), cs.inputs("s", 4), cs.inputs("d", 4)),
                 **inputs)
    assert w.named()["out"] == node and cs.gadget_constraints == 4 * 245


def test_designated_or_truth_table():
    for a in (0, 1):
        for b in (0, 1):
            cs = ConstraintSystem()
            gadgets.designated_or(cs, cs.input("a"), cs.input("b"))
            assert cs.num_constraints == 1
            assert cs.is_satisfied(cs.generate({"a": a, "b": b})) == bool(a or b)


def test_eddsa_gadget(rng):
    kp = keypair(rng)
    msg = rng.randrange(P)
    sig = eddsa_sign(kp, msg)

    def build(cs):
        return eddsa_verify(cs, (cs.input("ax"), cs.input("ay")), cs.input("m"),
                            (cs.input("rx"), cs.input("ry")), cs.input("s"))

    base = dict(ax=kp.public[0], ay=kp.public[1], m=msg, rx=sig.R.x, ry=sig.R.y, s=sig.S)
    cs, w = _run(build, **base)
    assert w.named()["out"] == 1
    assert cs.counts()[EDDSA] == 4218
    for key in ("m", "s"):
        _, w = _run(build, **{**base, key: (base[key] + 1) % P})
        assert w.named()["out"] == 0


def test_missing_input_is_reported():
    cs = ConstraintSystem()
    cs.output("out", cs.mul(cs.input("a"), cs.input("b")))
    with pytest.raises(MissingInputError):
        cs.evaluate({"a": 1})
