"""Rank-1 constraint system builder with witness generation and accounting.

Signals are linear combinations (LC) over variables; variable 0 is the
constant one.  Every allocated variable carries a hint that computes its
value from earlier variables, so evaluating a circuit is a single forward
pass followed by a check of every constraint A * B = C.

Two labels are attached to each constraint:

    component  the outermost accounting gadget active when it was added
               (nested gadgets are billed to their parent); constraints
               outside any gadget are "residual plumbing"
    scope      a slash-joined path of semantic checks ("cred0/revocation")
               used when reporting violations

Hard assertions can also carry a check tag naming the gadget whose result
they assert (an expired credential fails the assertion on the range proof
output, which is itself plumbing), so reports name the failed check.
"""

import hashlib
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from ..arith.field import P, to_hex
from ..arith.poseidon import hash2

PLUMBING = "residual plumbing"


class LC:
    """Sparse linear combination {variable index: coefficient}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: Dict[int, int] = terms if terms is not None else {}

    @staticmethod
    def const(c: int) -> "LC":
        c %= P
        return LC({0: c} if c else {})

    @staticmethod
    def var(i: int) -> "LC":
        return LC({i: 1})

    def is_constant(self) -> bool:
        return all(k == 0 for k in self.terms)

    def constant_value(self) -> int:
        return self.terms.get(0, 0)

    def _combine(self, other, sign: int) -> "LC":
        out = dict(self.terms)
        if isinstance(other, LC):
            for k, v in other.terms.items():
                nv = (out.get(k, 0) + sign * v) % P
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        else:
            c = int(other) % P
            if c:
                nv = (out.get(0, 0) + sign * c) % P
                if nv:
                    out[0] = nv
                else:
                    out.pop(0, None)
        return LC(out)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, 1)

    def __neg__(self):
        return LC({k: (-v) % P for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, LC):
            raise TypeError("LC * LC is not linear; use ConstraintSystem.mul")
        c = int(c) % P
        if c == 0:
            return LC()
        return LC({k: v * c % P for k, v in self.terms.items()})

    __rmul__ = __mul__

    def eval(self, w: Sequence[int]) -> int:
        return sum(w[k] * v for k, v in self.terms.items()) % P

    def __repr__(self):
        return f"LC({self.terms})"


def as_lc(x) -> LC:
    return x if isinstance(x, LC) else LC.const(int(x))


ONE = LC.const(1)


class ConstraintViolation(Exception):
    """Raised by evaluate() on the first unsatisfied constraint."""

    def __init__(self, index: int, component: str, scope: str, check: str = ""):
        self.index, self.component, self.scope = index, component, scope
        self.check = check or component
        super().__init__(f"constraint #{index} violated [scope={scope or '-'}, "
                         f"check={self.check}, component={component}]")


class MissingInputError(KeyError):
    pass


@dataclass
class Witness:
    values: List[int]
    cs: "ConstraintSystem"

    def __getitem__(self, i):
        return self.values[i]

    def value(self, lc) -> int:
        return as_lc(lc).eval(self.values)

    def public_values(self) -> List[int]:
        return [self.values[i] for i in self.cs.public_vars]

    def named(self) -> Dict[str, int]:
        return {n: self.values[i] for n, i in self.cs.names.items()}


class ConstraintSystem:
    def __init__(self, name: str = "circuit"):
        self.name = name
        self.num_vars = 1
        self.hints: List[Optional[Callable]] = [None]
        self.input_names: Dict[int, str] = {}
        self.names: Dict[str, int] = {}
        self.public_inputs: List[int] = []
        self.public_outputs: List[int] = []
        self.a: List[Dict[int, int]] = []
        self.b: List[Dict[int, int]] = []
        self.c: List[Dict[int, int]] = []
        self.components: List[str] = []
        self.scopes: List[str] = []
        self.occurrences: Dict[str, int] = {}
        self.var_origin: Dict[int, str] = {}
        self.boolean_vars: set = set()
        self.tags: Dict[int, str] = {}
        self._component_stack: List[str] = []
        self._scope_stack: List[str] = []
        self._digest = None

    # allocation -----------------------------------------------------------

    def input(self, name: str, public: bool = False) -> LC:
        if name in self.names:
            raise ValueError(f"duplicate input name {name!r}")
        i = self._new_var(None)
        self.input_names[i] = name
        self.names[name] = i
        if public:
            self.public_inputs.append(i)
        return LC.var(i)

    def inputs(self, prefix: str, n: int, public: bool = False) -> List[LC]:
        return [self.input(f"{prefix}[{k}]", public) for k in range(n)]

    def alloc(self, hint: Callable[[List[int]], int]) -> LC:
        return LC.var(self._new_var(hint))

    def _new_var(self, hint) -> int:
        i = self.num_vars
        self.num_vars += 1
        self.hints.append(hint)
        if self._component_stack:
            self.var_origin[i] = self._component_stack[0]
        self._digest = None
        return i

    def output(self, name: str, lc) -> LC:
        """Expose a computed signal as a named public output (one plumbing constraint)."""
        lc = as_lc(lc)
        i = self._new_var(lambda w, lc=lc: lc.eval(w))
        self.names[name] = i
        self.public_outputs.append(i)
        self.enforce(LC.var(i), ONE, lc)
        return LC.var(i)

    # constraints ----------------------------------------------------------

    def enforce(self, a, b, c):
        self.a.append(as_lc(a).terms)
        self.b.append(as_lc(b).terms)
        self.c.append(as_lc(c).terms)
        self.components.append(self._component_stack[0] if self._component_stack else PLUMBING)
        self.scopes.append("/".join(self._scope_stack))
        self._digest = None

    def enforce_equal(self, x, y, tag: str = ""):
        self.enforce(as_lc(x) - as_lc(y), ONE, LC())
        if tag:
            self.tags[self.num_constraints - 1] = tag

    def mul(self, x, y) -> LC:
        x, y = as_lc(x), as_lc(y)
        if x.is_constant():
            return y * x.constant_value()
        if y.is_constant():
            return x * y.constant_value()
        out = self.alloc(lambda w: x.eval(w) * y.eval(w) % P)
        self.enforce(x, y, out)
        return out

    def boolean(self, x):
        """Constrain x * (x - 1) = 0."""
        x = as_lc(x)
        self.enforce(x, x - 1, LC())
        if len(x.terms) == 1:
            (k, v), = x.terms.items()
            if v == 1:
                self.boolean_vars.add(k)

    def assert_true(self, bit, tag: str = ""):
        self.enforce(as_lc(bit) - 1, ONE, LC())
        if tag:
            self.tags[self.num_constraints - 1] = tag

    # labels ---------------------------------------------------------------

    @contextmanager
    def component(self, name: str):
        top = not self._component_stack
        if top:
            self.occurrences[name] = self.occurrences.get(name, 0) + 1
        self._component_stack.append(name)
        try:
            yield
        finally:
            self._component_stack.pop()

    @contextmanager
    def scope(self, label: str):
        self._scope_stack.append(label)
        try:
            yield
        finally:
            self._scope_stack.pop()

    # inspection -----------------------------------------------------------

    @property
    def num_constraints(self) -> int:
        return len(self.a)

    @property
    def public_vars(self) -> List[int]:
        return self.public_inputs + self.public_outputs

    def public_names(self) -> List[str]:
        rev = {i: n for n, i in self.names.items()}
        return [rev[i] for i in self.public_vars]

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for comp in self.components:
            out[comp] = out.get(comp, 0) + 1
        return out

    # evaluation -----------------------------------------------------------

    def generate(self, inputs: Dict[str, int]) -> List[int]:
        """Forward pass over the hints; does not check constraints."""
        w = [0] * self.num_vars
        w[0] = 1
        hints = self.hints
        names = self.input_names
        for i in range(1, self.num_vars):
            h = hints[i]
            if h is None:
                name = names[i]
                try:
                    w[i] = int(inputs[name]) % P
                except KeyError:
                    raise MissingInputError(f"missing circuit input {name!r}") from None
            else:
                w[i] = h(w) % P
        return w

    def violations(self, w: Sequence[int], limit: Optional[int] = None) -> List[int]:
        bad = []
        for idx, (a, b, c) in enumerate(zip(self.a, self.b, self.c)):
            av = sum(w[k] * v for k, v in a.items())
            bv = sum(w[k] * v for k, v in b.items())
            cv = sum(w[k] * v for k, v in c.items())
            if (av * bv - cv) % P:
                bad.append(idx)
                if limit is not None and len(bad) >= limit:
                    break
        return bad

    def evaluate(self, inputs: Dict[str, int]) -> Witness:
        w = self.generate(inputs)
        bad = self.violations(w, limit=1)
        if bad:
            i = bad[0]
            raise ConstraintViolation(i, self.components[i], self.scopes[i], self.tags.get(i, ""))
        return Witness(w, self)

    def is_satisfied(self, w: Sequence[int]) -> bool:
        return not self.violations(w, limit=1)

    def describe(self, index: int) -> dict:
        return {"index": index, "component": self.components[index], "scope": self.scopes[index],
                "check": self.tags.get(index, self.components[index])}

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        """Sparse triples with hex coefficients; variable 0 is the constant one."""
        def enc(terms):
            return {str(k): to_hex(v) for k, v in sorted(terms.items())}
        rev = {i: n for n, i in self.names.items()}
        return {
            "name": self.name,
            "field": to_hex(P),
            "numVariables": self.num_vars,
            "publicInputs": [[i, rev[i]] for i in self.public_inputs],
            "publicOutputs": [[i, rev[i]] for i in self.public_outputs],
            "privateInputs": [[i, n] for i, n in sorted(self.input_names.items())
                              if i not in set(self.public_inputs)],
            "constraints": [[enc(a), enc(b), enc(c)] for a, b, c in zip(self.a, self.b, self.c)],
            "components": self.counts(),
        }

    def digest(self) -> int:
        """Field-element fingerprint of the structure (not of any witness).

        The serialization is compressed with SHA-256 first; the two 128-bit
        halves are then folded with Poseidon so the digest lives in the field.
        """
        if self._digest is None:
            h = hashlib.sha256()
            h.update(f"{self.num_vars}|{self.public_inputs}|{self.public_outputs}|".encode())
            for rows in (self.a, self.b, self.c):
                for terms in rows:
                    h.update(repr(sorted(terms.items())).encode())
                    h.update(b";")
            d = h.digest()
            self._digest = hash2(int.from_bytes(d[:16], "big"), int.from_bytes(d[16:], "big"))
        return self._digest


def evaluate(cs: ConstraintSystem, private_inputs: Dict[str, int], public_inputs: Dict[str, int] = None) -> Witness:
    merged = dict(private_inputs)
    if public_inputs:
        merged.update(public_inputs)
    return cs.evaluate(merged)
