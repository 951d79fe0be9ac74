"""Run the registry service over HTTP and keep a quarter-subtree client in sync."""

import random

from zkcred.revocation import (ClientRegistryState, RegistryClient, RegistryService, RevocationRegistry,
                               capacity, serve_in_thread, sync_client_state)

from _common import new_key

issuer = new_key()
reg = RevocationRegistry(13, "transit-passes")
service = RegistryService()
service.add(reg, issuer.public)
server = serve_in_thread(service)
url = f"http://127.0.0.1:{server.server_address[1]}"
print(f"registry service on {url}, capacity {capacity(13):,} credentials")

client = RegistryClient.http(url)
mine = 123_456
state = ClientRegistryState.for_leaf(13, mine, 0.25)
sync_client_state(client, "transit-passes", state)
print(f"client stores {state.stored_bytes():,} bytes (full tree {(2 ** 14 - 1) * 32:,})")

rng = random.Random(1)
for _ in range(20):
    client.post_status("transit-passes", issuer, [(rng.randrange(capacity(13)), "revoked")])
sync_client_state(client, "transit-passes", state)
w = state.witness(mine)
print(f"after 20 signed revocations: version {state.version}, witness valid {w.verify(reg.root)}")

try:
    client.post_status("transit-passes", new_key(), [(mine, "revoked")])
except Exception as e:
    print("update signed by a stranger:", getattr(e, "code", e))
server.shutdown()
