"""Arithmetic gadgets: Poseidon, bit decomposition, comparators, bit extraction,
Merkle ascent.

Every gadget that appears as a line item in the accounting report opens a
component scope with its public name, so nested helpers (Num2Bits inside a
comparator, IsEqual inside extractKthBit) are billed to the outer gadget.
Helpers called outside any component are billed as residual plumbing.
"""

from typing import List, Sequence, Tuple

from ..arith.field import P
from ..arith.poseidon import FULL_ROUNDS, PARTIAL_ROUNDS, parameters
from .r1cs import LC, ONE, ConstraintSystem, as_lc

POSEIDON = "Poseidon hash"
SELECTOR = "Selector"
RANGE = "Range proof"
DIVMOD = "Division with rest"
KTH_BIT = "extractKthBit"

RANGE_BITS = 251          # LessThan(251) decomposes into 252 bits
REVOCATION_DIVISOR = 252
KTH_BIT_WIDTH = 253


# --- Poseidon ---------------------------------------------------------------

def _sbox(cs: ConstraintSystem, x: LC) -> LC:
    if x.is_constant():
        return LC.const(pow(x.constant_value(), 5, P))
    x2 = cs.mul(x, x)
    x4 = cs.mul(x2, x2)
    return cs.mul(x4, x)


def poseidon(cs: ConstraintSystem, inputs: Sequence) -> LC:
    """Poseidon over 1..16 signals; 240 constraints for two inputs.

    Linear layers stay symbolic, so only S-boxes cost constraints.  The
    capacity element of the first round is a constant and costs nothing.
    """
    t = len(inputs) + 1
    constants, mds = parameters(t)
    rp = PARTIAL_ROUNDS[t - 2]
    half = FULL_ROUNDS // 2
    with cs.component(POSEIDON):
        state = [LC()] + [as_lc(x) for x in inputs]
        for r in range(FULL_ROUNDS + rp):
            state = [s + constants[r * t + i] for i, s in enumerate(state)]
            if r < half or r >= half + rp:
                state = [_sbox(cs, s) for s in state]
            else:
                state[0] = _sbox(cs, state[0])
            state = [_mix(row, state) for row in mds]
        return state[0]


def _mix(row, state) -> LC:
    out = {}
    for m, s in zip(row, state):
        for k, v in s.terms.items():
            out[k] = (out.get(k, 0) + m * v) % P
    return LC({k: v for k, v in out.items() if v})


# --- bits and comparisons -------------------------------------------------------

def num2bits(cs: ConstraintSystem, x, n: int) -> List[LC]:
    """Little-endian decomposition of x into n booleans; n constraints.

    The lowest bit is expressed as x minus the weighted higher bits rather
    than as a fresh variable, which folds the recomposition check into its
    boolean constraint.  For n >= 254 the decomposition is not unique; pair
    with alias_check.
    """
    x = as_lc(x)
    bits = [None] * n
    rest = LC()
    for i in range(1, n):
        b = cs.alloc(lambda w, i=i: (x.eval(w) >> i) & 1)
        cs.boolean(b)
        bits[i] = b
        rest = rest + b * (1 << i)
    bits[0] = x - rest
    cs.boolean(bits[0])
    return bits


def bits2num(bits: Sequence) -> LC:
    out = LC()
    for i, b in enumerate(bits):
        out = out + as_lc(b) * (1 << i)
    return out


def is_zero(cs: ConstraintSystem, x) -> LC:
    """1 if x == 0 else 0; two constraints."""
    x = as_lc(x)
    inv = cs.alloc(lambda w: pow(x.eval(w), -1, P) if x.eval(w) else 0)
    out = cs.alloc(lambda w: 0 if x.eval(w) else 1)
    cs.enforce(x, inv, ONE - out)
    cs.enforce(x, out, LC())
    return out


def is_equal(cs: ConstraintSystem, a, b) -> LC:
    return is_zero(cs, as_lc(a) - as_lc(b))


def less_than(cs: ConstraintSystem, a, b, n: int) -> LC:
    """1 if a < b, for operands whose difference is below 2**n; n + 1 constraints."""
    bits = num2bits(cs, as_lc(a) + (1 << n) - as_lc(b), n + 1)
    return ONE - bits[n]


def and_(cs: ConstraintSystem, a, b) -> LC:
    return cs.mul(a, b)


def and_all(cs: ConstraintSystem, bits: Sequence) -> LC:
    acc = as_lc(bits[0])
    for b in bits[1:]:
        acc = cs.mul(acc, b)
    return acc


def xor(cs: ConstraintSystem, a, b) -> LC:
    a, b = as_lc(a), as_lc(b)
    return a + b - cs.mul(a, b) * 2


def or_(cs: ConstraintSystem, a, b) -> LC:
    a, b = as_lc(a), as_lc(b)
    return a + b - cs.mul(a, b)


# --- accounted gadgets ------------------------------------------------------------

def range_lt(cs: ConstraintSystem, a, b) -> LC:
    """1 if a < b; operands below 2**251.  252 constraints."""
    with cs.component(RANGE):
        return less_than(cs, a, b, RANGE_BITS)


def divmod_const(cs: ConstraintSystem, dividend, divisor: int = REVOCATION_DIVISOR) -> Tuple[LC, LC, LC]:
    """Integer division by a constant: (quotient, remainder, ok); 252 constraints.

    ok = 1 certifies remainder < divisor.  Callers must also bound the
    quotient (the revocation path does so by decomposing it into path bits).
    A prover who picks quotient + 1 gets a remainder in the negative band
    that the comparator rejects only if it is below -2**251; extractKthBit
    returns 0 for any remainder outside 0..252, so that choice can never
    produce a valid status bit.
    """
    dividend = as_lc(dividend)
    with cs.component(DIVMOD):
        q = cs.alloc(lambda w: dividend.eval(w) // divisor)
        r = dividend - q * divisor
        ok = less_than(cs, r, divisor, RANGE_BITS)
    return q, r, ok


def extract_kth_bit(cs: ConstraintSystem, x, k) -> LC:
    """Bit k of x (x < 2**253); 1,012 constraints.

    Decompose x, compare every index with k, and sum the matching bit.  The
    index comparisons are one-hot (or all zero when k > 252), so the sum is
    itself boolean.
    """
    k = as_lc(k)
    with cs.component(KTH_BIT):
        bits = num2bits(cs, x, KTH_BIT_WIDTH)
        out = LC()
        for i, b in enumerate(bits):
            hit = is_equal(cs, k, i)
            out = out + cs.mul(b, hit)
        return out


def selector(cs: ConstraintSystem, node, sibling, direction) -> Tuple[LC, LC]:
    """Order (node, sibling) into (left, right); direction 1 = node is the right child.

    Five constraints: one boolean check and four products.
    """
    node, sibling, s = as_lc(node), as_lc(sibling), as_lc(direction)
    with cs.component(SELECTOR):
        cs.boolean(s)
        keep_n = cs.mul(ONE - s, node)
        swap_s = cs.mul(s, sibling)
        keep_s = cs.mul(ONE - s, sibling)
        swap_n = cs.mul(s, node)
        return keep_n + swap_s, keep_s + swap_n


def merkle_ascend(cs: ConstraintSystem, leaf, siblings: Sequence, directions: Sequence) -> LC:
    """Root from a leaf and its authentication path; 245 constraints per level."""
    node = as_lc(leaf)
    for sib, d in zip(siblings, directions):
        left, right = selector(cs, node, sib, d)
        node = poseidon(cs, [left, right])
    return node


def designated_or(cs: ConstraintSystem, a, b):
    """Assert a OR b for boolean a, b via a + b - a*b = 1 (one constraint)."""
    a, b = as_lc(a), as_lc(b)
    cs.enforce(a, b, a + b - 1)
