"""Key files and the on-disk key cache.

Each key pair is stored as {name}.pk, {name}.vk and {name}.manifest.json
under the key directory, where name combines the circuit name, the backend
and a prefix of the circuit digest.  Keys are generated on first use.
"""

import json
import os
import time
from pathlib import Path
from typing import Dict, Optional, Tuple

from ..arith.field import to_hex
from ..circuits.r1cs import ConstraintSystem
from .proof import DigestMismatchError


def default_home() -> Path:
    return Path(os.environ.get("ZKCRED_HOME", Path.home() / ".zkcred"))


class KeyStore:
    def __init__(self, root=None):
        self.root = Path(root) if root is not None else default_home() / "keys"
        self._cache: Dict[Tuple[str, int], tuple] = {}

    @staticmethod
    def key_name(cs: ConstraintSystem, backend: str) -> str:
        return f"{cs.name}-{backend}-{to_hex(cs.digest())[:16]}"

    def paths(self, name: str):
        return (self.root / f"{name}.pk", self.root / f"{name}.vk", self.root / f"{name}.manifest.json")

    def save(self, cs: ConstraintSystem, backend: str, pk, vk) -> dict:
        from . import get_backend
        mod = get_backend(backend)
        self.root.mkdir(parents=True, exist_ok=True)
        name = self.key_name(cs, backend)
        pk_path, vk_path, man_path = self.paths(name)
        pk_bytes, vk_bytes = mod.pk_to_bytes(pk), mod.vk_to_bytes(vk)
        # write-then-rename so a crashed setup never leaves a half key behind
        for path, data in ((pk_path, pk_bytes), (vk_path, vk_bytes)):
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_bytes(data)
            tmp.replace(path)
        manifest = {"backend": backend, "circuitDigest": to_hex(cs.digest()), "circuit": cs.name,
                    "createdAt": int(time.time()), "numConstraints": cs.num_constraints,
                    "numPublic": len(cs.public_vars), "pkBytes": len(pk_bytes), "vkBytes": len(vk_bytes)}
        man_path.write_text(json.dumps(manifest, indent=2))
        return manifest

    def manifest(self, cs: ConstraintSystem, backend: str) -> Optional[dict]:
        path = self.paths(self.key_name(cs, backend))[2]
        return json.loads(path.read_text()) if path.exists() else None

    def load(self, cs: ConstraintSystem, backend: str, need_pk: bool = True):
        """(pk, vk) from disk, or None when absent; pk is None if not requested."""
        from . import get_backend
        key = (backend, cs.digest())
        if key in self._cache:
            return self._cache[key]
        mod = get_backend(backend)
        pk_path, vk_path, _ = self.paths(self.key_name(cs, backend))
        if not vk_path.exists() or (need_pk and not pk_path.exists()):
            return None
        vk = mod.vk_from_bytes(vk_path.read_bytes())
        if vk.digest != cs.digest():
            raise DigestMismatchError(f"{vk_path} does not belong to circuit {cs.name}")
        if not need_pk:
            return None, vk
        pk = mod.pk_from_bytes(pk_path.read_bytes())
        self._cache[key] = (pk, vk)
        return pk, vk

    def get(self, cs: ConstraintSystem, backend: str, rng=None, create: bool = True):
        """Load the key pair for cs, running setup on first use when `create`."""
        found = self.load(cs, backend)
        if found is not None:
            return found
        if not create:
            raise FileNotFoundError(f"no {backend} keys for circuit {cs.name}")
        from . import get_backend
        pk, vk = get_backend(backend).setup(cs, rng)
        self.save(cs, backend, pk, vk)
        self._cache[(backend, cs.digest())] = (pk, vk)
        return pk, vk

    def verification_key(self, cs: ConstraintSystem, backend: str, create: bool = True):
        key = (backend, cs.digest())
        if key in self._cache:
            return self._cache[key][1]
        found = self.load(cs, backend, need_pk=False)
        if found is not None:
            return found[1]
        return self.get(cs, backend, create=create)[1]
