"""Baby Jubjub, the twisted Edwards curve a*x^2 + y^2 = 1 + d*x^2*y^2 over the BN254 scalar field."""

from typing import NamedTuple

from .field import P, FieldError, from_bytes, inv, to_bytes

A = 168700
D = 168696

ORDER = 21888242871839275222246405745257275088614511777268538073601725287587578984328
SUBORDER = ORDER >> 3


class Point(NamedTuple):
    x: int
    y: int

    def to_bytes(self) -> bytes:
        return to_bytes(self.x) + to_bytes(self.y)

    @classmethod
    def from_bytes(cls, b: bytes) -> "Point":
        if len(b) != 64:
            raise FieldError("a point encodes as 64 bytes")
        return cls(from_bytes(b[:32]), from_bytes(b[32:]))

    def to_json(self) -> dict:
        return {"x": to_bytes(self.x).hex(), "y": to_bytes(self.y).hex()}

    @classmethod
    def from_json(cls, d: dict) -> "Point":
        return cls.from_bytes(bytes.fromhex(d["x"]) + bytes.fromhex(d["y"]))


IDENTITY = Point(0, 1)

GENERATOR = Point(
    995203441582195749578291179787384436505546430278305826713579947235728471134,
    5472060717959818805561601436314318772137091100104008585924551046643952123905,
)

BASE8 = Point(
    5299619240641551281634865583518297030282874472190772894086521144482721001553,
    16950150798460657717958625567821834550301663161624707787222815936182638968203,
)


def is_on_curve(pt) -> bool:
    x, y = pt
    if not (0 <= x < P and 0 <= y < P):
        return False
    x2, y2 = x * x % P, y * y % P
    return (A * x2 + y2 - 1 - D * x2 % P * y2) % P == 0


def point_add(p1, p2) -> Point:
    x1, y1 = p1
    x2, y2 = p2
    beta = x1 * y2 % P
    gamma = y1 * x2 % P
    delta = (y1 - A * x1) * (x2 + y2) % P
    tau = beta * gamma % P
    x3 = (beta + gamma) * inv(1 + D * tau) % P
    y3 = (delta + A * beta - gamma) * inv(1 - D * tau) % P
    return Point(x3, y3)


def negate(pt) -> Point:
    return Point((-pt[0]) % P, pt[1])


def _proj_add(p1, p2):
    # complete projective addition; valid because a is square and d is not
    X1, Y1, Z1 = p1
    X2, Y2, Z2 = p2
    a_ = Z1 * Z2 % P
    b_ = a_ * a_ % P
    c_ = X1 * X2 % P
    d_ = Y1 * Y2 % P
    e_ = D * c_ % P * d_ % P
    f_ = b_ - e_
    g_ = b_ + e_
    X3 = a_ * f_ % P * ((X1 + Y1) * (X2 + Y2) - c_ - d_) % P
    Y3 = a_ * g_ % P * (d_ - A * c_) % P
    return X3, Y3, f_ * g_ % P


def scalar_mul(k: int, pt) -> Point:
    if k < 0:
        return scalar_mul(-k, negate(pt))
    acc = (0, 1, 1)
    base = (pt[0] % P, pt[1] % P, 1)
    while k:
        if k & 1:
            acc = _proj_add(acc, base)
        base = _proj_add(base, base)
        k >>= 1
    zi = inv(acc[2])
    return Point(acc[0] * zi % P, acc[1] * zi % P)


def in_subgroup(pt) -> bool:
    return is_on_curve(pt) and scalar_mul(SUBORDER, pt) == IDENTITY


# Montgomery form B*v^2 = u^3 + MA*u^2 + u, birationally equivalent to the curve
# above; the in-circuit scalar multiplication works in these coordinates.
MONT_A = 2 * (A + D) * inv(A - D) % P
MONT_B = 4 * inv(A - D) % P


def to_montgomery(pt):
    x, y = pt
    u = (1 + y) * inv(1 - y) % P
    v = u * inv(x) % P
    return u, v


def from_montgomery(uv) -> Point:
    u, v = uv
    return Point(u * inv(v) % P, (u - 1) * inv(u + 1) % P)
