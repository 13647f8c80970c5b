"""custodia: tamper-evident chain-of-custody ledger for financial-crime
investigations.

An append-only, hash-chained, signature-authenticated transaction log
drives a deterministic state machine of investigation cases and
evidence events, backed by a content-addressed evidence store and
fronted by an HTTP service, a CLI and a dashboard.
"""

from .config import Config, load_config
from .errors import CustodiaError
from .keys import KeyPair
from .ledger import Block, Ledger, Transaction, VerificationReport, build_transaction, verify_log
from .node import CustodyNode, create_data_dir, open_node
from .registry import Identity, IdentityRegistry, PermissionDecision
from .state import AlertNotification, Case, Event, ForensicState, Vocabulary
from .store import EvidenceDescriptor, EvidenceStore

__version__ = "0.1.0"

__all__ = [
    "AlertNotification",
    "Block",
    "Case",
    "Config",
    "CustodiaError",
    "CustodyNode",
    "Event",
    "EvidenceDescriptor",
    "EvidenceStore",
    "ForensicState",
    "Identity",
    "IdentityRegistry",
    "KeyPair",
    "Ledger",
    "PermissionDecision",
    "Transaction",
    "VerificationReport",
    "Vocabulary",
    "build_transaction",
    "create_data_dir",
    "load_config",
    "open_node",
    "verify_log",
    "__version__",
]
