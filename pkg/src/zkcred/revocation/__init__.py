from .registry import (
    BITS_PER_LEAF, FULL_LEAF, REVOKED, VALID, NODE_BYTES,
    RegistryError, CapacityError, RevokedError, SyncError,
    StatusDelta, NonRevocationWitness, BitmapTree, RevocationRegistry,
    capacity, locate, new_registry, set_status, witness, witness_to_json, witness_from_json,
)
from .sync import SyncPlan, ClientRegistryState, hybrid_sync_plan, apply_deltas, rebuild_root
from .store import RegistryStore
from .service import (
    RegistryService, RegistryClient, RegistryClientError, make_server, serve_in_thread,
    sign_status_update, status_message, sync_client_state,
)
