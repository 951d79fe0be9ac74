"""Proof requests, holder wallets, presentations and their verification."""

from .errors import PresentationError
from .request import (DesignatedVerifier, ProofRequest, RegistryRequirement, RequestedCredential,
                      canonical_spec, new_request)
from .policy import RegistryView, VerifierPolicy, fetch_view
from .vp import Disclosure, VerifiablePresentation
from .wallet import SyncedRegistry, Wallet, create_presentation, link_attributes, present_chain
from .verify import VerificationReport, verify_presentation
from .designated import designated_presentation, forge_presentation, open_envelope, seal
from .carryover import (CarryoverBundle, CredentialDraft, binding_carryover, carryover_circuit,
                        check_carryover, complete_draft, issue_with_node)

__all__ = [
    "CarryoverBundle", "CredentialDraft", "DesignatedVerifier", "Disclosure", "PresentationError",
    "ProofRequest", "RegistryRequirement", "RegistryView", "RequestedCredential", "SyncedRegistry",
    "VerifiablePresentation", "VerificationReport", "VerifierPolicy", "Wallet", "binding_carryover",
    "canonical_spec", "carryover_circuit", "check_carryover", "complete_draft", "create_presentation",
    "designated_presentation", "fetch_view", "forge_presentation", "issue_with_node", "link_attributes",
    "new_request", "open_envelope", "present_chain", "seal", "verify_presentation",
]
