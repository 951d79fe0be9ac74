"""Typed attribute values to credential leaves.

Kinds and their rules:

    short-string  bytes packed little-endian, sum a_i * 256**i, at most 31 bytes
    long-string   UTF-8 bytes folded with Poseidon over 31-byte chunks
    integer       the integer itself, negatives as P - |v|
    float         round(x * 10**7), negatives as P - |v|
    coordinate    same rule as float, applied to decimal degrees
    boolean       True -> 1, False -> 0
    date          UNIX seconds

Only long strings lose information, so presentations that reveal one must
carry the raw value next to the leaf.
"""

import math
from dataclasses import dataclass
from datetime import date, datetime, timezone
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Any

from .arith.field import P
from .arith.poseidon import poseidon_hash

SHORT_STRING_MAX = 31
CHUNK = 31
FLOAT_SCALE = 10 ** 7

KINDS = ("short-string", "long-string", "integer", "float", "boolean", "date", "coordinate")


class EncodingError(ValueError):
    pass


class LengthError(EncodingError):
    pass


class DomainError(EncodingError):
    pass


@dataclass(frozen=True)
class AttributeValue:
    kind: str
    payload: Any

    def __post_init__(self):
        if self.kind not in KINDS:
            raise EncodingError(f"unknown attribute kind {self.kind!r}")


@dataclass(frozen=True)
class EncodedLeaf:
    leaf: int
    needs_raw_attachment: bool


def pack_bytes(b: bytes) -> int:
    return int.from_bytes(b, "little")


def encode_long_string(s) -> int:
    """Poseidon fold over [length, chunk_0, chunk_1, ...].

    running_0 = H(first input), running_i = H(running_{i-1}, input_i).  The
    length word comes first so that inputs of different lengths never share
    a fold prefix.  The empty string therefore hashes to H(0): its length
    word doubles as the empty marker.
    """
    data = s.encode("utf-8") if isinstance(s, str) else bytes(s)
    words = [len(data)] + [pack_bytes(data[i:i + CHUNK]) for i in range(0, len(data), CHUNK)]
    running = poseidon_hash([words[0]])
    for w in words[1:]:
        running = poseidon_hash([running, w])
    return running


EMPTY_LEAF = encode_long_string(b"")


def encode_signed(v: int) -> int:
    if abs(v) >= P // 2:
        raise DomainError("magnitude exceeds the signed field range")
    return v % P


def encode_float(x) -> int:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("non-finite float")
    # scale the shortest decimal form exactly, so 0.1 maps to 1000000 and not 999999
    scaled = (Decimal(repr(x)) * FLOAT_SCALE).to_integral_value(rounding=ROUND_HALF_EVEN)
    return encode_signed(int(scaled))


def _to_unix(value) -> int:
    if isinstance(value, bool):
        raise DomainError("boolean is not a date")
    if isinstance(value, int):
        ts = value
    elif isinstance(value, datetime):
        if value.tzinfo is None:
            value = value.replace(tzinfo=timezone.utc)
        ts = int(value.timestamp())
    elif isinstance(value, date):
        ts = int(datetime(value.year, value.month, value.day, tzinfo=timezone.utc).timestamp())
    elif isinstance(value, str):
        text = value.replace("Z", "+00:00")
        try:
            parsed = datetime.fromisoformat(text)
        except ValueError as e:
            raise DomainError(f"not an ISO-8601 date: {value!r}") from e
        return _to_unix(parsed)
    else:
        raise DomainError(f"cannot read a date from {type(value).__name__}")
    if ts < 0:
        raise DomainError("dates before the UNIX epoch are not supported")
    return ts


def encode(value: AttributeValue) -> EncodedLeaf:
    kind, v = value.kind, value.payload
    if kind == "short-string":
        data = v.encode("utf-8") if isinstance(v, str) else bytes(v)
        if len(data) > SHORT_STRING_MAX:
            raise LengthError(f"short string has {len(data)} bytes, limit is {SHORT_STRING_MAX}")
        return EncodedLeaf(pack_bytes(data), False)
    if kind == "long-string":
        return EncodedLeaf(encode_long_string(v), True)
    if kind == "integer":
        if isinstance(v, bool) or not isinstance(v, int):
            raise DomainError("integer attribute needs an int")
        return EncodedLeaf(encode_signed(v), False)
    if kind in ("float", "coordinate"):
        return EncodedLeaf(encode_float(v), False)
    if kind == "boolean":
        if not isinstance(v, bool):
            raise DomainError("boolean attribute needs True or False")
        return EncodedLeaf(int(v), False)
    if kind == "date":
        return EncodedLeaf(_to_unix(v), False)
    raise EncodingError(kind)


def encode_leaf(kind: str, payload) -> int:
    return encode(AttributeValue(kind, payload)).leaf


def verify_raw_attachment(raw: AttributeValue, leaf: int) -> bool:
    try:
        return encode(raw).leaf == int(leaf) % P
    except EncodingError:
        return False


def decode_float(leaf: int) -> float:
    """Inverse of the float rule, for display."""
    v = leaf - P if leaf > P // 2 else leaf
    return v / FLOAT_SCALE
