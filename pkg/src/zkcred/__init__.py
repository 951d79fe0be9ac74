"""Anonymous credentials over zk-SNARKs: issuance, revocation, circuits, proofs, presentations."""

__version__ = "0.1.0"
