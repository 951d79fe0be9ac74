"""Arithmetic in the BN254 scalar field.

Everything else in the package (curve, hashes, circuits) works over this
field.  Internally values are plain Python ints reduced mod P; the
FieldElement class is a small typed wrapper for callers who want one.
"""

import secrets

P = 21888242871839275222246405745257275088548364400416034343698204186575808495617
FIELD_BYTES = 32


class FieldError(ValueError):
    pass


def fe(x) -> int:
    """Reduce an int (or FieldElement) into [0, P)."""
    return int(x) % P


def inv(x: int) -> int:
    x %= P
    if x == 0:
        raise ZeroDivisionError("zero has no inverse in the field")
    return pow(x, -1, P)


def neg(x: int) -> int:
    return (-x) % P


def random_element(rng=None) -> int:
    if rng is None:
        return secrets.randbelow(P)
    return rng.randrange(P)


def to_bytes(x: int) -> bytes:
    """32-byte little-endian encoding of a reduced element."""
    x = int(x)
    if not 0 <= x < P:
        raise FieldError(f"value out of field range: {x}")
    return x.to_bytes(FIELD_BYTES, "little")


def from_bytes(b: bytes) -> int:
    if len(b) != FIELD_BYTES:
        raise FieldError(f"expected {FIELD_BYTES} bytes, got {len(b)}")
    x = int.from_bytes(b, "little")
    if x >= P:
        raise FieldError("non-canonical field encoding")
    return x


def to_hex(x: int) -> str:
    return to_bytes(x).hex()


def from_hex(s: str) -> int:
    return from_bytes(bytes.fromhex(s))


def signed(x: int) -> int:
    """Interpret x as a signed integer: values above P/2 are negative."""
    x %= P
    return x - P if x > P // 2 else x


class FieldElement:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = int(value) % P

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"FieldElement({self.value})"

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other % P
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __add__(self, other):
        return FieldElement(self.value + int(other))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - int(other))

    def __rsub__(self, other):
        return FieldElement(int(other) - self.value)

    def __mul__(self, other):
        return FieldElement(self.value * int(other))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value)

    def __pow__(self, e):
        return FieldElement(pow(self.value, e, P))

    def inverse(self):
        return FieldElement(inv(self.value))

    def __truediv__(self, other):
        return FieldElement(self.value * inv(int(other)))

    def to_bytes(self) -> bytes:
        return to_bytes(self.value)

    @classmethod
    def from_bytes(cls, b: bytes):
        return cls(from_bytes(b))
