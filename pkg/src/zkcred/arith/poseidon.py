"""Poseidon hash with the circomlib parameter set (x^5 S-box, 8 full rounds).

Round constants and MDS matrices are regenerated from the Grain LFSR
procedure of the Poseidon reference, which reproduces the circomlib tables
exactly.  Generation is lazy and cached per width.
"""

from functools import lru_cache
from operator import mul

from .field import P

FULL_ROUNDS = 8
# partial rounds indexed by width t - 2, t = inputs + 1
PARTIAL_ROUNDS = [56, 57, 56, 60, 60, 63, 64, 63, 60, 66, 60, 65, 70, 60, 64, 68]
MAX_INPUTS = len(PARTIAL_ROUNDS)


class ArityError(ValueError):
    pass


class _Grain:
    """80-bit Grain LFSR in self-shrinking mode."""

    def __init__(self, t: int, rp: int):
        bits = []
        for value, width in ((1, 2), (0, 4), (254, 12), (t, 12), (FULL_ROUNDS, 10), (rp, 10)):
            bits += [int(c) for c in format(value, f"0{width}b")]
        bits += [1] * 30
        self.state = 0
        for b in bits:
            self.state = (self.state << 1) | b
        for _ in range(160):
            self._step()

    def _step(self) -> int:
        s = self.state
        # taps at positions 0, 13, 23, 38, 51, 62 counted from the oldest bit
        nb = ((s >> 79) ^ (s >> 66) ^ (s >> 56) ^ (s >> 41) ^ (s >> 28) ^ (s >> 17)) & 1
        self.state = ((s << 1) | nb) & ((1 << 80) - 1)
        return nb

    def _bit(self) -> int:
        while True:
            if self._step():
                return self._step()
            self._step()

    def field_element(self) -> int:
        x = 0
        for _ in range(254):
            x = (x << 1) | self._bit()
        return x


@lru_cache(maxsize=None)
def parameters(t: int):
    """Return (round constants, MDS matrix) for state width t."""
    if not 2 <= t <= MAX_INPUTS + 1:
        raise ArityError(f"unsupported Poseidon width {t}")
    rp = PARTIAL_ROUNDS[t - 2]
    g = _Grain(t, rp)
    constants = []
    for _ in range((FULL_ROUNDS + rp) * t):
        x = g.field_element()
        while x >= P:
            x = g.field_element()
        constants.append(x)
    while True:
        raw = [g.field_element() % P for _ in range(2 * t)]
        if len(set(raw)) != len(raw):
            continue
        xs, ys = raw[:t], raw[t:]
        if any((a + b) % P == 0 for a in xs for b in ys):
            continue
        mds = [[pow(a + b, -1, P) for b in ys] for a in xs]
        return tuple(constants), tuple(tuple(row) for row in mds)


def is_full_round(r: int, t: int) -> bool:
    return r < FULL_ROUNDS // 2 or r >= FULL_ROUNDS // 2 + PARTIAL_ROUNDS[t - 2]


def _pow5(x: int) -> int:
    x2 = x * x % P
    return x2 * x2 % P * x % P


def poseidon_hash(inputs) -> int:
    """Hash 1 to 16 field elements to one field element."""
    n = len(inputs)
    if not 1 <= n <= MAX_INPUTS:
        raise ArityError(f"Poseidon takes 1..{MAX_INPUTS} inputs, got {n}")
    t = n + 1
    constants, mds = parameters(t)
    rounds = FULL_ROUNDS + PARTIAL_ROUNDS[t - 2]
    state = [0] + [int(x) % P for x in inputs]
    rng = range(t)
    half = FULL_ROUNDS // 2
    last_partial = half + PARTIAL_ROUNDS[t - 2]
    for r in range(rounds):
        base = r * t
        state = [state[i] + constants[base + i] for i in rng]
        if r < half or r >= last_partial:
            state = [_pow5(s) for s in state]
        else:
            state[0] = _pow5(state[0])
        state = [sum(map(mul, row, state)) % P for row in mds]
    return state[0]


def hash2(a: int, b: int) -> int:
    return poseidon_hash([a, b])
