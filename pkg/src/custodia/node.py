"""Composition root: ledger + state machine + registry + evidence store.

All mutations funnel through ``submit``: preconditions are checked
against live state, the signed transaction is sealed into its own
block, only then does the state mutate and the alert fan out. Replay of
the ledger therefore always reproduces the live state, and nothing that
was denied ever reaches the chain.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .alerts import AlertHub
from .config import Config
from .errors import CorruptChain
from .keys import KeyPair
from .ledger import BlockReceipt, Ledger, Transaction, build_transaction
from .state import AlertNotification, ApplyOutcome, ForensicState
from .store import EvidenceStore


def now_ms() -> int:
    return int(time.time() * 1000)


@dataclass(frozen=True)
class SubmitOutcome:
    receipt: BlockReceipt
    result: int | None
    alert: AlertNotification | None


class CustodyNode:
    """One investigation system instance over a ledger file and a store root."""

    def __init__(self, config: Config):
        if config.admin_public_key is None:
            raise ValueError("config must supply the bootstrap admin public key")
        self.config = config
        self.ledger = Ledger(config.ledger_path)
        self.state = ForensicState(config.admin_public_key, config.vocabulary())
        self.store = EvidenceStore(config.store_path,
                                   purge_gate=self._digest_marked_deleted)
        self.alert_hub = AlertHub(config.alert_buffer_size)
        self._submit_lock = threading.Lock()
        self._rebuild_state()

    def _rebuild_state(self) -> None:
        self.ledger.replay(lambda tx: self.state.apply(tx))

    def _digest_marked_deleted(self, digest: bytes) -> bool:
        return any(e.evidence_hash == digest and e.status == "deleted"
                   for e in self.state.events)

    def close(self) -> None:
        self.ledger.close()

    # -- mutation path -----------------------------------------------------

    def submit(self, tx: Transaction) -> SubmitOutcome:
        """Validate, append, commit, notify; atomic under the submit lock."""
        with self._submit_lock:
            self.state.check(tx)
            receipt = self.ledger.append(tx)
            outcome: ApplyOutcome = self.state.commit(tx)
        if outcome.alert is not None:
            self.alert_hub.publish(outcome.alert)
        return SubmitOutcome(receipt, outcome.result, outcome.alert)

    def invoke(self, signer: KeyPair, function: str, args: dict,
               timestamp_ms: int | None = None) -> SubmitOutcome:
        tx = build_transaction(signer, function, args,
                               timestamp_ms if timestamp_ms is not None else now_ms())
        return self.submit(tx)

    # -- reads ---------------------------------------------------------------

    def verify(self):
        return self.ledger.verify()

    def canonical_dump(self) -> str:
        return self.state.canonical_dump()

    def replay_dump(self) -> str:
        """State dump rebuilt from the persisted chain alone (audit path)."""
        fresh = ForensicState(self.config.admin_public_key, self.config.vocabulary())
        self.ledger.replay(lambda tx: fresh.apply(tx))
        return fresh.canonical_dump()


def open_node(config: Config) -> CustodyNode:
    node = CustodyNode(config)
    report = node.verify()
    if not report.ok:
        raise CorruptChain(
            f"refusing to operate: chain fails verification at height "
            f"{report.first_bad_height} ({report.failure_kind})")
    return node


def create_data_dir(directory: str | Path, admin_public_key: bytes,
                    config: Config | None = None) -> Config:
    """Lay out a relocatable local data directory with its config file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cfg = config or Config()
    cfg.admin_public_key = admin_public_key
    # persist relative paths so the directory can be copied between machines
    cfg.ledger_path = Path("ledger.log")
    cfg.store_path = Path("store")
    (directory / "config.toml").write_text(cfg.to_toml())
    cfg.ledger_path = directory / "ledger.log"
    cfg.store_path = directory / "store"
    return cfg
