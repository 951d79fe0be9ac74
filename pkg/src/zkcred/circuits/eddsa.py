"""In-circuit EdDSA-Poseidon verification over Baby Jubjub.

The layout follows the circomlib verifier so the constraint count matches
the published 4,218:

    S -> 253 bits, S < subgroup order          253 + 261
    h = Poseidon(R8, A, msg) -> strict bits     321 + 254 + 262
    A8 = 8A by three doublings, A8 != 0           18 + 2
    h * A8, Montgomery ladder in two segments        2,310
    S * Base8, 3-bit fixed windows in two segments     523
    R8 + h*A8                                            6
    reified equality of both sides, AND of checks       8

Instead of asserting, the gadget returns a validity bit, so callers can
either assert it or feed it into a disjunction (designated verifier).
"""

from typing import Sequence, Tuple

from ..arith.babyjub import A, BASE8, D, MONT_A, MONT_B, SUBORDER, Point, point_add, scalar_mul, to_montgomery
from ..arith.field import P
from . import gadgets
from .r1cs import LC, ONE, ConstraintSystem, as_lc

EDDSA = "EdDSA signature"

SEGMENT_ANY = 148
SEGMENT_FIX = 246


def _div(a: int, b: int) -> int:
    # hints must not raise on degenerate witnesses; the constraint then fails
    return a * pow(b, -1, P) % P if b % P else 0


def _const(*lcs) -> bool:
    return all(as_lc(x).is_constant() for x in lcs)


def _val(x) -> int:
    return as_lc(x).constant_value()


Pt = Tuple[LC, LC]


def _pt(p) -> Pt:
    return as_lc(p[0]), as_lc(p[1])


# --- Twisted Edwards ------------------------------------------------------------

def baby_add(cs: ConstraintSystem, p1, p2) -> Pt:
    (x1, y1), (x2, y2) = _pt(p1), _pt(p2)
    if _const(x1, y1, x2, y2):
        q = point_add((_val(x1), _val(y1)), (_val(x2), _val(y2)))
        return LC.const(q.x), LC.const(q.y)
    beta = cs.mul(x1, y2)
    gamma = cs.mul(y1, x2)
    delta = cs.mul(y1 - x1 * A, x2 + y2)
    tau = cs.mul(beta, gamma)
    xout = cs.alloc(lambda w: _div((beta + gamma).eval(w), (1 + D * tau.eval(w))))
    cs.enforce(xout, ONE + tau * D, beta + gamma)
    num = delta + beta * A - gamma
    yout = cs.alloc(lambda w: _div(num.eval(w), (1 - D * tau.eval(w))))
    cs.enforce(yout, ONE - tau * D, num)
    return xout, yout


# --- Montgomery -------------------------------------------------------------------

def edwards_to_montgomery(cs: ConstraintSystem, p) -> Pt:
    x, y = _pt(p)
    if _const(x, y):
        u, v = to_montgomery((_val(x), _val(y)))
        return LC.const(u), LC.const(v)
    u = cs.alloc(lambda w: _div(1 + y.eval(w), 1 - y.eval(w)))
    cs.enforce(u, ONE - y, ONE + y)
    v = cs.alloc(lambda w: _div(u.eval(w), x.eval(w)))
    cs.enforce(v, x, u)
    return u, v


def montgomery_to_edwards(cs: ConstraintSystem, p) -> Pt:
    u, v = _pt(p)
    if _const(u, v):
        uu, vv = _val(u), _val(v)
        return LC.const(_div(uu, vv)), LC.const(_div(uu - 1, uu + 1))
    x = cs.alloc(lambda w: _div(u.eval(w), v.eval(w)))
    cs.enforce(x, v, u)
    y = cs.alloc(lambda w: _div(u.eval(w) - 1, u.eval(w) + 1))
    cs.enforce(y, u + 1, u - 1)
    return x, y


def _mont_add_native(p1, p2):
    (u1, v1), (u2, v2) = p1, p2
    lam = _div(v2 - v1, u2 - u1)
    u3 = (MONT_B * lam * lam - MONT_A - u1 - u2) % P
    return u3, (lam * (u1 - u3) - v1) % P


def _mont_double_native(p):
    u, v = p
    lam = _div(3 * u * u + 2 * MONT_A * u + 1, 2 * MONT_B * v)
    u3 = (MONT_B * lam * lam - MONT_A - 2 * u) % P
    return u3, (lam * (u - u3) - v) % P


def montgomery_add(cs: ConstraintSystem, p1, p2) -> Pt:
    (u1, v1), (u2, v2) = _pt(p1), _pt(p2)
    if _const(u1, v1, u2, v2):
        u, v = _mont_add_native((_val(u1), _val(v1)), (_val(u2), _val(v2)))
        return LC.const(u), LC.const(v)
    lam = cs.alloc(lambda w: _div((v2 - v1).eval(w), (u2 - u1).eval(w)))
    cs.enforce(lam, u2 - u1, v2 - v1)
    u3 = cs.alloc(lambda w: (MONT_B * lam.eval(w) ** 2 - MONT_A - u1.eval(w) - u2.eval(w)) % P)
    cs.enforce(lam * MONT_B, lam, u3 + MONT_A + u1 + u2)
    v3 = cs.alloc(lambda w: (lam.eval(w) * (u1.eval(w) - u3.eval(w)) - v1.eval(w)) % P)
    cs.enforce(lam, u1 - u3, v3 + v1)
    return u3, v3


def montgomery_double(cs: ConstraintSystem, p) -> Pt:
    u, v = _pt(p)
    if _const(u, v):
        uu, vv = _mont_double_native((_val(u), _val(v)))
        return LC.const(uu), LC.const(vv)
    u2 = cs.mul(u, u)
    num = u2 * 3 + u * (2 * MONT_A) + 1
    lam = cs.alloc(lambda w: _div(num.eval(w), 2 * MONT_B * v.eval(w)))
    cs.enforce(lam, v * (2 * MONT_B), num)
    u3 = cs.alloc(lambda w: (MONT_B * lam.eval(w) ** 2 - MONT_A - 2 * u.eval(w)) % P)
    cs.enforce(lam * MONT_B, lam, u3 + MONT_A + u * 2)
    v3 = cs.alloc(lambda w: (lam.eval(w) * (u.eval(w) - u3.eval(w)) - v.eval(w)) % P)
    cs.enforce(lam, u - u3, v3 + v)
    return u3, v3


def mux2(cs: ConstraintSystem, sel, p0, p1) -> Pt:
    """p1 if sel else p0."""
    sel = as_lc(sel)
    return tuple(cs.mul(as_lc(b) - as_lc(a), sel) + as_lc(a) for a, b in zip(p0, p1))


# --- variable-base multiplication ---------------------------------------------------

def _segment_mul_any(cs: ConstraintSystem, bits: Sequence[LC], p) -> Tuple[Pt, Pt]:
    """Returns (bits * p in Edwards form, 2**(n-1) * p in Montgomery form)."""
    base = edwards_to_montgomery(cs, p)
    dbl, acc = base, base
    for b in bits[1:]:
        dbl = montgomery_double(cs, dbl)
        added = montgomery_add(cs, dbl, acc)
        acc = mux2(cs, b, acc, added)
    # acc = p + sum_{i>=1} b_i 2^i p; drop the initial p unless bit 0 is set
    acc_e = montgomery_to_edwards(cs, acc)
    px, py = _pt(p)
    minus_p = baby_add(cs, acc_e, (-px, py))
    return mux2(cs, bits[0], minus_p, acc_e), dbl


def escalar_mul_any(cs: ConstraintSystem, bits: Sequence[LC], p) -> Pt:
    px, py = _pt(p)
    zero = gadgets.is_zero(cs, px)
    # a zero x-coordinate would break the Montgomery map; substitute Base8
    start = (px + cs.mul(LC.const(BASE8.x) - px, zero), py + cs.mul(LC.const(BASE8.y) - py, zero))
    segments = [bits[i:i + SEGMENT_ANY] for i in range(0, len(bits), SEGMENT_ANY)]
    acc, dbl = _segment_mul_any(cs, segments[0], start)
    for seg in segments[1:]:
        nxt = montgomery_to_edwards(cs, montgomery_double(cs, dbl))
        part, dbl = _segment_mul_any(cs, seg, nxt)
        acc = baby_add(cs, acc, part)
    x, y = acc
    return cs.mul(x, ONE - zero), y + cs.mul(ONE - y, zero)


# --- fixed-base multiplication ------------------------------------------------------

def _mux3(cs: ConstraintSystem, s: Sequence[LC], table: Sequence[Tuple[int, int]]) -> Pt:
    s0, s1, s2 = s
    s10 = cs.mul(s1, s0)
    out = []
    for j in range(2):
        c = [pt[j] for pt in table]
        hi = (s10 * (c[7] - c[6] - c[5] + c[4] - c[3] + c[2] + c[1] - c[0])
              + s1 * (c[6] - c[4] - c[2] + c[0]) + s0 * (c[5] - c[4] - c[1] + c[0]) + (c[4] - c[0]))
        lo = s10 * (c[3] - c[2] - c[1] + c[0]) + s1 * (c[2] - c[0]) + s0 * (c[1] - c[0]) + c[0]
        out.append(cs.mul(hi, s2) + lo)
    return out[0], out[1]


def _segment_mul_fix(cs: ConstraintSystem, bits: Sequence, base: Point) -> Tuple[Pt, Point]:
    """Windowed fixed-base multiplication; returns (result, 8**windows * base)."""
    n_windows = (len(bits) - 1) // 3 + 1
    bits = list(bits) + [LC()] * (3 * n_windows - len(bits))
    # window i picks (k + 1) * 8**i * base; the constant offset sum is removed at the end
    window_base = base
    windows = []
    correction = None
    for i in range(n_windows):
        table = [to_montgomery(scalar_mul(k + 1, window_base)) for k in range(8)]
        windows.append(_mux3(cs, bits[3 * i:3 * i + 3], table))
        correction = window_base if correction is None else point_add(correction, window_base)
        window_base = scalar_mul(8, window_base)
    start = scalar_mul(2, window_base)
    correction = point_add(correction, start)
    acc = (LC.const(to_montgomery(start)[0]), LC.const(to_montgomery(start)[1]))
    for win in windows:
        acc = montgomery_add(cs, acc, win)
    acc_e = montgomery_to_edwards(cs, acc)
    out = baby_add(cs, acc_e, (LC.const(-correction.x), LC.const(correction.y)))
    return out, window_base


def escalar_mul_fix(cs: ConstraintSystem, bits: Sequence, base: Point = BASE8) -> Pt:
    acc = None
    for i in range(0, len(bits), SEGMENT_FIX):
        part, base = _segment_mul_fix(cs, bits[i:i + SEGMENT_FIX], base)
        acc = part if acc is None else baby_add(cs, acc, part)
    return acc


# --- comparison against a constant ---------------------------------------------------

def comp_constant(cs: ConstraintSystem, bits: Sequence, ct: int) -> LC:
    """1 if the 254-bit number given by `bits` is greater than ct."""
    bits = [as_lc(b) for b in bits] + [LC()] * (254 - len(bits))
    total = LC()
    a, b, e = 1, (1 << 128) - 1, 1
    for i in range(127):
        clsb, cmsb = (ct >> (2 * i)) & 1, (ct >> (2 * i + 1)) & 1
        slsb, smsb = bits[2 * i], bits[2 * i + 1]
        both = cs.mul(smsb, slsb)
        if not cmsb and not clsb:
            part = both * (-b) + smsb * b + slsb * b
        elif not cmsb and clsb:
            part = both * a - slsb * a + smsb * b - smsb * a + a
        elif cmsb and not clsb:
            part = both * b - smsb * a + a
        else:
            part = both * (-a) + a
        total = total + part
        b -= e
        a += e
        e *= 2
    return gadgets.num2bits(cs, total, 135)[127]


# --- verifier ------------------------------------------------------------------------

def eddsa_verify(cs: ConstraintSystem, pk, msg, R8, S) -> LC:
    """Validity bit of an EdDSA-Poseidon signature (R8, S) on msg under pk."""
    ax, ay = _pt(pk)
    rx, ry = _pt(R8)
    with cs.component(EDDSA):
        s_bits = gadgets.num2bits(cs, S, 253)
        s_too_big = comp_constant(cs, s_bits, SUBORDER - 1)

        h = gadgets.poseidon(cs, [rx, ry, ax, ay, msg])
        h_bits = gadgets.num2bits(cs, h, 254)
        h_alias = comp_constant(cs, h_bits, P - 1)

        a2 = baby_add(cs, (ax, ay), (ax, ay))
        a4 = baby_add(cs, a2, a2)
        a8 = baby_add(cs, a4, a4)
        a8_zero = gadgets.is_zero(cs, a8[0])

        right = baby_add(cs, (rx, ry), escalar_mul_any(cs, h_bits, a8))
        left = escalar_mul_fix(cs, s_bits, BASE8)

        eq_x = gadgets.is_equal(cs, left[0], right[0])
        eq_y = gadgets.is_equal(cs, left[1], right[1])
        return gadgets.and_all(cs, [ONE - s_too_big, ONE - h_alias, ONE - a8_zero, eq_x, eq_y])
