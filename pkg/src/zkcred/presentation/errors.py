"""Stable error codes for holder-side and verifier-side failures."""

NO_MATCHING_CREDENTIAL = "NO_MATCHING_CREDENTIAL"
EXPIRED = "EXPIRED"
REVOKED = "REVOKED"
STALE_REGISTRY = "STALE_REGISTRY"
UNKNOWN_REGISTRY = "UNKNOWN_REGISTRY"
MISSING_BINDING_KEY = "MISSING_BINDING_KEY"
MISSING_PROVING_KEY = "MISSING_PROVING_KEY"
UNTRUSTED_CIRCUIT = "UNTRUSTED_CIRCUIT"
BROKEN_CHAIN = "BROKEN_CHAIN"
NOT_DELEGATABLE = "NOT_DELEGATABLE"
UNEQUAL_ATTRIBUTES = "UNEQUAL_ATTRIBUTES"
PREDICATE_FALSE = "PREDICATE_FALSE"
UNSATISFIED = "UNSATISFIED"
UNSUPPORTED_REQUEST = "UNSUPPORTED_REQUEST"
DECRYPTION_FAILED = "DECRYPTION_FAILED"
INVALID_PRESENTATION = "INVALID_PRESENTATION"


class PresentationError(Exception):
    """A refusal with a stable machine-readable code."""

    def __init__(self, code: str, message: str, detail=None):
        super().__init__(message)
        self.code = code
        self.detail = detail

    def to_json(self) -> dict:
        doc = {"code": self.code, "message": str(self)}
        if self.detail is not None:
            doc["detail"] = self.detail
        return doc
