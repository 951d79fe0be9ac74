"""Proof backends.

Both backends are modules exposing the same functions:

    setup(cs, rng=None) -> (pk, vk)
    prove(pk, cs, witness, rng=None, force=False) -> Proof
    verify(vk, proof, public_inputs=None) -> bool
    pk_to_bytes / pk_from_bytes / vk_to_bytes / vk_from_bytes
"""

from . import dev, groth16
from .keys import KeyStore
from .proof import DigestMismatchError, Proof, UnsatisfiedWitnessError

BACKENDS = {"groth16": groth16, "dev": dev}
BACKEND_IDS = {groth16.BACKEND_ID: "groth16", dev.BACKEND_ID: "dev"}
# "sound" names the real proof system as opposed to the dev stand-in
ALIASES = {"sound": "groth16"}


def get_backend(name: str):
    name = ALIASES.get(name, BACKEND_IDS.get(name, name))
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(BACKENDS)}") from None


__all__ = ["ALIASES", "BACKENDS", "BACKEND_IDS", "DigestMismatchError", "KeyStore", "Proof", "UnsatisfiedWitnessError",
           "dev", "get_backend", "groth16"]
