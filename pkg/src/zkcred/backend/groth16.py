"""Groth16 over BN254 with circuit-specific setup.

The curve groups, pairing, multi-scalar multiplication and FFTs come from
zksnake's compiled BN254 module; the protocol (QAP reduction, key
generation, proving, verification) is implemented here.

Setup is single-party: whoever runs it learns tau, alpha, beta, gamma and
delta and could forge proofs for this circuit.  Keys from an untrusted
party must not be relied on; a multi-party ceremony is out of scope.

Public inputs are bound by extra QAP rows x_i * 0 = 0 for the constant one
and every public variable, which keeps their polynomials linearly
independent even when a public variable occurs in no constraint.
"""

import json
import secrets
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence

from zksnake._algebra import ec_bn254 as ec
from zksnake.polynomial import evaluate_lagrange_coefficients, fft, ifft

from ..arith.field import P, from_hex, to_hex
from ..circuits.r1cs import ConstraintSystem, Witness
from .proof import DigestMismatchError, Proof, UnsatisfiedWitnessError

BACKEND_ID = "groth16-bn254"
G1_BYTES, G2_BYTES = 32, 64
PROOF_BYTES = 2 * G1_BYTES + G2_BYTES
COSET_SHIFT = 5          # multiplicative generator of the scalar field


@dataclass
class ProvingKey:
    digest: int
    domain: int
    public: List[int]              # variable ids: constant one first, then public vars
    private: List[int]
    alpha1: object
    beta1: object
    beta2: object
    delta1: object
    delta2: object
    a_query: dict                  # var -> G1, nonzero entries only
    b1_query: dict
    b2_query: dict
    l_query: dict                  # private var -> G1
    h_query: list
    backend: str = BACKEND_ID


@dataclass
class VerificationKey:
    digest: int
    alpha1: object
    beta2: object
    gamma2: object
    delta2: object
    ic: list                       # G1 per public slot, constant one first
    backend: str = BACKEND_ID

    @property
    def num_public(self) -> int:
        return len(self.ic) - 1


def _rand(rng) -> int:
    while True:
        x = (rng.getrandbits(256) if rng is not None else secrets.randbits(256)) % P
        if x:
            return x


def _domain_size(cs: ConstraintSystem) -> int:
    rows = cs.num_constraints + len(cs.public_vars) + 1
    n = 1
    while n < rows:
        n <<= 1
    return n


def _qap_at(cs: ConstraintSystem, n: int, tau: int):
    """u_i(tau), v_i(tau), w_i(tau) for every variable."""
    lag = evaluate_lagrange_coefficients(n, tau, P)
    u, v, w = {}, {}, {}
    for j, (a, b, c) in enumerate(zip(cs.a, cs.b, cs.c)):
        lj = lag[j]
        for target, terms in ((u, a), (v, b), (w, c)):
            for k, coef in terms.items():
                target[k] = (target.get(k, 0) + coef * lj) % P
    m = cs.num_constraints
    for r, var in enumerate([0] + cs.public_vars):
        u[var] = (u.get(var, 0) + lag[m + r]) % P
    return u, v, w


def _g1_batch(base, scalars: Sequence[int]):
    return ec.batch_multi_scalar_g1([base] * len(scalars), list(scalars)) if scalars else []


def _g2_batch(base, scalars: Sequence[int]):
    return ec.batch_multi_scalar_g2([base] * len(scalars), list(scalars)) if scalars else []


def _sparse(batch, base, table: dict, keys) -> dict:
    keys = [k for k in keys if table.get(k, 0)]
    return dict(zip(keys, batch(base, [table[k] for k in keys])))


def setup(cs: ConstraintSystem, rng=None):
    """Generate (ProvingKey, VerificationKey) for cs.  `rng` needs getrandbits."""
    n = _domain_size(cs)
    tau, alpha, beta, gamma, delta = (_rand(rng) for _ in range(5))
    g1, g2 = ec.g1(), ec.g2()
    u, v, w = _qap_at(cs, n, tau)
    public = [0] + list(cs.public_vars)
    pub_set = set(public)
    private = [i for i in range(cs.num_vars) if i not in pub_set]

    def k(i):
        return (beta * u.get(i, 0) + alpha * v.get(i, 0) + w.get(i, 0)) % P

    gi, di = pow(gamma, -1, P), pow(delta, -1, P)
    ic = _g1_batch(g1, [k(i) * gi % P for i in public])
    l_scalars = {i: k(i) * di % P for i in private}
    z_tau = (pow(tau, n, P) - 1) % P
    h_scalars, t = [], z_tau * di % P
    for _ in range(n - 1):
        h_scalars.append(t)
        t = t * tau % P
    all_vars = range(cs.num_vars)
    pk = ProvingKey(
        digest=cs.digest(), domain=n, public=public, private=private,
        alpha1=g1 * alpha, beta1=g1 * beta, beta2=g2 * beta, delta1=g1 * delta, delta2=g2 * delta,
        a_query=_sparse(_g1_batch, g1, u, all_vars),
        b1_query=_sparse(_g1_batch, g1, v, all_vars),
        b2_query=_sparse(_g2_batch, g2, v, all_vars),
        l_query=_sparse(_g1_batch, g1, l_scalars, private),
        h_query=_g1_batch(g1, h_scalars),
    )
    vk = VerificationKey(cs.digest(), pk.alpha1, pk.beta2, g2 * gamma, pk.delta2, ic)
    return pk, vk


def _h_coefficients(cs: ConstraintSystem, n: int, w: Sequence[int]) -> List[int]:
    """Coefficients of (A(X) B(X) - C(X)) / Z(X) via evaluation on a coset."""
    def rows(mat):
        out = [0] * n
        for j, terms in enumerate(mat):
            out[j] = sum(w[k] * c for k, c in terms.items()) % P
        return out

    a, b, c = rows(cs.a), rows(cs.b), rows(cs.c)
    m = cs.num_constraints
    for r, var in enumerate([0] + cs.public_vars):
        a[m + r] = w[var]
    shift = [1] * n
    for i in range(1, n):
        shift[i] = shift[i - 1] * COSET_SHIFT % P

    def to_coset(evals):
        coeffs = ifft(evals, P, n)
        return fft([x * s % P for x, s in zip(coeffs, shift)], P, n)

    ea, eb, ec_ = to_coset(a), to_coset(b), to_coset(c)
    z_inv = pow((pow(COSET_SHIFT, n, P) - 1) % P, -1, P)
    quotient = [(x * y - z) * z_inv % P for x, y, z in zip(ea, eb, ec_)]
    coeffs = ifft(quotient, P, n)
    inv_shift = pow(COSET_SHIFT, -1, P)
    s, out = 1, []
    for x in coeffs[: n - 1]:
        out.append(x * s % P)
        s = s * inv_shift % P
    return out


def _msm_g1(table: dict, w: Sequence[int]):
    items = [(pt, w[i]) for i, pt in table.items() if w[i]]
    if not items:
        return ec.g1() * 0
    pts, sc = zip(*items)
    return ec.multiscalar_mul_g1(list(pts), list(sc))


def prove(pk: ProvingKey, cs: ConstraintSystem, witness, rng=None, force: bool = False) -> Proof:
    """Groth16 proof for a satisfying witness.

    force=True skips the satisfaction check; the result then fails
    verification, which the tamper tests use to exercise the verifier.
    """
    if pk.digest != cs.digest():
        raise DigestMismatchError("proving key belongs to a different circuit")
    w = witness.values if isinstance(witness, Witness) else list(witness)
    if len(w) != cs.num_vars:
        raise ValueError("witness length does not match the circuit")
    if not force:
        bad = cs.violations(w, limit=1)
        if bad:
            raise UnsatisfiedWitnessError(cs.describe(bad[0]))
    r, s = _rand(rng), _rand(rng)
    h = _h_coefficients(cs, pk.domain, w)

    a = pk.alpha1 + _msm_g1(pk.a_query, w) + pk.delta1 * r
    b1 = pk.beta1 + _msm_g1(pk.b1_query, w) + pk.delta1 * s
    items = [(pt, w[i]) for i, pt in pk.b2_query.items() if w[i]]
    b2 = pk.beta2 + pk.delta2 * s
    if items:
        pts, sc = zip(*items)
        b2 = b2 + ec.multiscalar_mul_g2(list(pts), list(sc))
    c = _msm_g1(pk.l_query, w)
    hs = [(pt, x) for pt, x in zip(pk.h_query, h) if x]
    if hs:
        pts, sc = zip(*hs)
        c = c + ec.multiscalar_mul_g1(list(pts), list(sc))
    c = c + a * s + b1 * r - pk.delta1 * (r * s % P)
    data = bytes(a.to_bytes()) + bytes(b2.to_bytes()) + bytes(c.to_bytes())
    publics = tuple(w[i] for i in cs.public_vars)
    return Proof(BACKEND_ID, data, publics, pk.digest)


def verify(vk: VerificationKey, proof: Proof, public_inputs: Optional[Sequence[int]] = None) -> bool:
    """Pairing check; malformed input yields False, never an exception."""
    publics = list(proof.public_inputs if public_inputs is None else public_inputs)
    if proof.backend != vk.backend or proof.digest != vk.digest:
        return False
    if len(publics) != vk.num_public or any(not 0 <= int(x) < P for x in publics):
        return False
    if len(proof.data) != PROOF_BYTES:
        return False
    try:
        a = ec.PointG1.from_bytes(proof.data[:G1_BYTES])
        b = ec.PointG2.from_bytes(proof.data[G1_BYTES:G1_BYTES + G2_BYTES])
        c = ec.PointG1.from_bytes(proof.data[G1_BYTES + G2_BYTES:])
        acc = vk.ic[0]
        nz = [(pt, int(x)) for pt, x in zip(vk.ic[1:], publics) if int(x)]
        if nz:
            pts, sc = zip(*nz)
            acc = acc + ec.multiscalar_mul_g1(list(pts), list(sc))
        return ec.pairing(a, b) == ec.multi_pairing([vk.alpha1, acc, c], [vk.beta2, vk.gamma2, vk.delta2])
    except Exception:
        return False
    except BaseException as e:
        # the curve library reports invalid points as a pyo3 panic, a BaseException
        if isinstance(e, (KeyboardInterrupt, SystemExit, GeneratorExit)):
            raise
        return False


# --- key files -------------------------------------------------------------------
#
# Layout: magic, u32 header length, JSON header, then points.  Sparse queries
# are stored as u32 count followed by (u32 variable id, point) records.

PK_MAGIC, VK_MAGIC = b"ZKCPK1\n", b"ZKCVK1\n"


def _header(magic: bytes, doc: dict) -> bytes:
    raw = json.dumps(doc, sort_keys=True).encode()
    return magic + struct.pack("<I", len(raw)) + raw


def _sparse_bytes(table: dict) -> bytes:
    out = [struct.pack("<I", len(table))]
    for i, pt in sorted(table.items()):
        out.append(struct.pack("<I", i) + bytes(pt.to_bytes()))
    return b"".join(out)


class _Reader:
    def __init__(self, data: bytes, magic: bytes):
        if not data.startswith(magic):
            raise ValueError("not a key file of the expected kind")
        self.data, self.pos = data, len(magic)
        (n,) = struct.unpack_from("<I", data, self.pos)
        self.pos += 4
        self.header = json.loads(data[self.pos:self.pos + n])
        self.pos += n

    def u32(self) -> int:
        (v,) = struct.unpack_from("<I", self.data, self.pos)
        self.pos += 4
        return v

    def g1(self):
        b = self.data[self.pos:self.pos + G1_BYTES]
        self.pos += G1_BYTES
        return ec.PointG1.from_bytes(b)

    def g2(self):
        b = self.data[self.pos:self.pos + G2_BYTES]
        self.pos += G2_BYTES
        return ec.PointG2.from_bytes(b)

    def sparse(self, read) -> dict:
        out = {}
        for _ in range(self.u32()):
            i = self.u32()
            out[i] = read()
        return out


def pk_to_bytes(pk: ProvingKey) -> bytes:
    head = {"backend": pk.backend, "digest": to_hex(pk.digest), "domain": pk.domain,
            "public": pk.public, "private": pk.private}
    parts = [_header(PK_MAGIC, head)]
    parts += [bytes(p.to_bytes()) for p in (pk.alpha1, pk.beta1, pk.beta2, pk.delta1, pk.delta2)]
    parts += [_sparse_bytes(t) for t in (pk.a_query, pk.b1_query, pk.b2_query, pk.l_query)]
    parts.append(struct.pack("<I", len(pk.h_query)))
    parts += [bytes(p.to_bytes()) for p in pk.h_query]
    return b"".join(parts)


def pk_from_bytes(data: bytes) -> ProvingKey:
    r = _Reader(data, PK_MAGIC)
    h = r.header
    alpha1, beta1, beta2, delta1, delta2 = r.g1(), r.g1(), r.g2(), r.g1(), r.g2()
    a, b1, b2, l = r.sparse(r.g1), r.sparse(r.g1), r.sparse(r.g2), r.sparse(r.g1)
    hq = [r.g1() for _ in range(r.u32())]
    return ProvingKey(from_hex(h["digest"]), h["domain"], h["public"], h["private"],
                      alpha1, beta1, beta2, delta1, delta2, a, b1, b2, l, hq, h["backend"])


def vk_to_bytes(vk: VerificationKey) -> bytes:
    parts = [_header(VK_MAGIC, {"backend": vk.backend, "digest": to_hex(vk.digest), "numPublic": vk.num_public})]
    parts += [bytes(p.to_bytes()) for p in (vk.alpha1, vk.beta2, vk.gamma2, vk.delta2)]
    parts += [bytes(p.to_bytes()) for p in vk.ic]
    return b"".join(parts)


def vk_from_bytes(data: bytes) -> VerificationKey:
    r = _Reader(data, VK_MAGIC)
    h = r.header
    alpha1, beta2, gamma2, delta2 = r.g1(), r.g2(), r.g2(), r.g2()
    ic = [r.g1() for _ in range(h["numPublic"] + 1)]
    return VerificationKey(from_hex(h["digest"]), alpha1, beta2, gamma2, delta2, ic, h["backend"])
