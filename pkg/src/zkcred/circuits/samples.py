"""Random well-formed inputs for the preset presentation circuits (benchmarks, tests)."""

import random
import time
from typing import Optional

from ..arith.eddsa import eddsa_keygen, eddsa_sign
from .scenarios import ScenarioSpec, SlotWitness, assemble_vp_circuit, build_inputs


def sample_inputs(spec: ScenarioSpec, rng: Optional[random.Random] = None) -> dict:
    """Inputs for `spec` from freshly issued credentials; predicates are not supported."""
    from ..credential import AttributeDescriptor, MetaInputs, Schema, issue
    from ..revocation import RevocationRegistry

    if spec.predicates or spec.designated:
        raise ValueError("sample inputs cover specs without predicates or designated mode")
    rng = rng or random.Random()
    key = lambda: eddsa_keygen(rng.getrandbits(256).to_bytes(32, "little"))
    schema = Schema("sample", [AttributeDescriptor(p, f"a{p}", "integer") for p in range(8)])
    reg = RevocationRegistry(spec.depth, "sample")
    cap = min(reg.capacity, 1 << 20)
    holder = key()
    expires = int(time.time()) + 10 ** 6
    # chain: slot 0 is held by `holder`, slot i issued by the key bound in slot i + 1
    keys = [holder] + [key() for _ in range(spec.chain)]
    slots = []
    for i in range(spec.chain):
        attrs = [rng.getrandbits(64) for _ in range(8)]
        meta = MetaInputs(rng.randrange(cap), 0, keys[i].public, expires, delegatable=i > 0)
        slots.append(issue(keys[i + 1], schema, meta, attrs))
    for _ in range(spec.credentials - 1):
        attrs = [rng.getrandbits(64) for _ in range(8)]
        slots.append(issue(key(), schema, MetaInputs(rng.randrange(cap), 0, holder.public, expires), attrs))
    challenge = rng.getrandbits(250)
    sig = eddsa_sign(holder, challenge)
    holder_slots = spec.holder_slots()
    witnesses = [SlotWitness(c, reg.witness(c.revocation_id), sig if s in holder_slots else None)
                 for s, c in enumerate(slots)]
    return build_inputs(spec, witnesses, challenge, int(time.time()))


def sample_witness(spec: ScenarioSpec, rng: Optional[random.Random] = None):
    return assemble_vp_circuit(spec).evaluate(sample_inputs(spec, rng))
