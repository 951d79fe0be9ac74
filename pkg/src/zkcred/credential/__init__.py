from .merkle import MerklePath, merkle_root, merkle_prove, merkle_verify, merkle_levels, path_root
from .schema import Schema, AttributeDescriptor, SchemaError, canonical_json, document_hash, registry_ref_hash
from .credential import (
    Credential, MetaInputs, IssuanceError, SchemaMismatchError, CapacityError,
    issue, build_meta, encode_attributes,
    META_REVOCATION_ID, META_SCHEMA_HASH, META_BINDING_X, META_BINDING_Y,
    META_REGISTRY_REF, META_EXPIRATION, META_DELEGATABLE, META_RESERVED,
)
