"""Uniform operation surface over a local node or a remote service.

The CLI and the scenario loader program against this interface so every
workflow runs identically embedded (--local) and over HTTP (--server);
the differential tests lean on that equivalence.
"""

from __future__ import annotations


from typing import Protocol

from . import codec
from .keys import KeyPair
from .node import CustodyNode, SubmitOutcome, now_ms
from .store import EvidenceDescriptor


class Invoker(Protocol):
    def init(self, signer: KeyPair, timestamp_ms: int | None = None) -> dict: ...
    def register_identity(self, signer: KeyPair, key_hex: str, role: str,
                          display_name: str, timestamp_ms: int | None = None) -> dict: ...
    def add_case(self, signer: KeyPair, name: str, description: str,
                 responsible_hex: str, global_id: str, case_hash_hex: str,
                 timestamp_ms: int | None = None) -> dict: ...
    def update_case_description(self, signer: KeyPair, case_id: int, description: str,
                                timestamp_ms: int | None = None) -> dict: ...
    def update_case_status(self, signer: KeyPair, case_id: int, status: str,
                           timestamp_ms: int | None = None) -> dict: ...
    def update_case_responsible(self, signer: KeyPair, case_id: int,
                                responsible_hex: str,
                                timestamp_ms: int | None = None) -> dict: ...
    def add_case_investigator(self, signer: KeyPair, case_id: int,
                              investigator_hex: str,
                              timestamp_ms: int | None = None) -> dict: ...
    def add_event(self, signer: KeyPair, case_id: int, event_type: str,
                  description: str, status: str, evidence_hash_hex: str,
                  timestamp_ms: int | None = None) -> dict: ...
    def update_event_status(self, signer: KeyPair, event_id: int, status: str,
                            timestamp_ms: int | None = None) -> dict: ...
    def transfer_custody(self, signer: KeyPair, event_id: int, new_owner_hex: str,
                         timestamp_ms: int | None = None) -> dict: ...
    def stats(self) -> dict: ...
    def list_cases(self) -> dict: ...
    def get_case(self, case_id: int) -> dict: ...
    def list_case_events(self, case_id: int) -> dict: ...
    def get_event(self, event_id: int) -> dict: ...
    def identities(self) -> dict: ...
    def verify(self) -> dict: ...
    def state_dump(self) -> str: ...
    def meta(self) -> dict: ...
    def put_evidence(self, content: bytes) -> dict: ...
    def attach_descriptor(self, digest_hex: str, fmt: str, raw: bytes) -> dict: ...
    def get_evidence(self, digest_hex: str) -> bytes: ...
    def store_audit(self) -> str: ...


def _receipt_doc(outcome: SubmitOutcome) -> dict:
    doc = {
        "txId": outcome.receipt.tx_id.hex(),
        "height": outcome.receipt.height,
        "blockHash": outcome.receipt.block_hash.hex(),
    }
    if outcome.result is not None:
        doc["result"] = outcome.result
    if outcome.alert is not None:
        doc["alertSeq"] = outcome.alert.seq
    return doc


class LocalInvoker:
    """Embedded mode: operates directly on the ledger and store files."""

    def __init__(self, node: CustodyNode):
        self.node = node

    def _invoke(self, signer: KeyPair, function: str, args: dict,
                timestamp_ms: int | None) -> dict:
        outcome = self.node.invoke(signer, function, args,
                                   timestamp_ms if timestamp_ms is not None else now_ms())
        return _receipt_doc(outcome)

    def init(self, signer, timestamp_ms=None):
        return self._invoke(signer, "f1", {}, timestamp_ms)

    def register_identity(self, signer, key_hex, role, display_name, timestamp_ms=None):
        return self._invoke(signer, "fX-register", {
            "key": codec.from_hex(key_hex, 32, "key"),
            "role": role,
            "displayName": display_name,
        }, timestamp_ms)

    def add_case(self, signer, name, description, responsible_hex, global_id,
                 case_hash_hex, timestamp_ms=None):
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        doc = self._invoke(signer, "f2", {
            "name": name,
            "description": description,
            "responsible": codec.from_hex(responsible_hex, 32, "responsible"),
            "globalId": global_id,
            "timestampMs": ts,
            "hash": codec.from_hex(case_hash_hex, 32, "hash"),
        }, ts)
        doc["caseId"] = doc.get("result")
        return doc

    def update_case_description(self, signer, case_id, description, timestamp_ms=None):
        return self._invoke(signer, "f3",
                            {"caseId": case_id, "description": description},
                            timestamp_ms)

    def update_case_status(self, signer, case_id, status, timestamp_ms=None):
        return self._invoke(signer, "f4", {"caseId": case_id, "status": status},
                            timestamp_ms)

    def update_case_responsible(self, signer, case_id, responsible_hex,
                                timestamp_ms=None):
        return self._invoke(signer, "f5", {
            "caseId": case_id,
            "responsible": codec.from_hex(responsible_hex, 32, "responsible"),
        }, timestamp_ms)

    def add_case_investigator(self, signer, case_id, investigator_hex,
                              timestamp_ms=None):
        return self._invoke(signer, "f6", {
            "caseId": case_id,
            "investigator": codec.from_hex(investigator_hex, 32, "investigator"),
        }, timestamp_ms)

    def add_event(self, signer, case_id, event_type, description, status,
                  evidence_hash_hex, timestamp_ms=None):
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        doc = self._invoke(signer, "f12", {
            "caseId": case_id,
            "type": event_type,
            "description": description,
            "status": status,
            "hash": codec.from_hex(evidence_hash_hex, 32, "hash"),
            "timestampMs": ts,
        }, ts)
        doc["eventId"] = doc.get("result")
        return doc

    def update_event_status(self, signer, event_id, status, timestamp_ms=None):
        return self._invoke(signer, "f13", {"eventId": event_id, "status": status},
                            timestamp_ms)

    def transfer_custody(self, signer, event_id, new_owner_hex, timestamp_ms=None):
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        return self._invoke(signer, "fX-custody", {
            "eventId": event_id,
            "newOwner": codec.from_hex(new_owner_hex, 32, "newOwner"),
            "timestampMs": ts,
        }, ts)

    # -- reads ---------------------------------------------------------------

    def stats(self):
        return {"cases": self.node.state.get_number_of_cases(),
                "events": self.node.state.get_global_number_of_events()}

    def list_cases(self):
        return {"count": self.node.state.get_number_of_cases(),
                "cases": [c.to_dict() for c in self.node.state.cases]}

    def get_case(self, case_id):
        return self.node.state.get_case(case_id).to_dict()

    def list_case_events(self, case_id):
        return {"count": self.node.state.get_number_of_events_case(case_id),
                "events": [e.to_dict() for e in self.node.state.get_events_case(case_id)]}

    def get_event(self, event_id):
        return self.node.state.get_event(event_id).to_dict()

    def identities(self):
        return {"identities": [i.to_dict()
                               for i in self.node.state.registry.identities()]}

    def verify(self):
        return self.node.verify().to_dict()

    def state_dump(self):
        return self.node.canonical_dump()

    def meta(self):
        vocab = self.node.state.vocabulary
        return {
            "caseStatuses": list(vocab.case_statuses),
            "eventStatuses": list(vocab.event_statuses),
            "eventTypes": list(vocab.event_types),
            "roles": ["prosecutor", "investigator", "auditor"],
            "adminKey": self.node.state.registry.admin_key.hex(),
        }

    def put_evidence(self, content):
        digest = self.node.store.put_blob(content)
        return {"digest": digest.hex(), "length": len(content)}

    def attach_descriptor(self, digest_hex, fmt, raw):
        descriptor = EvidenceDescriptor.from_bytes(fmt, raw)
        self.node.store.attach_descriptor(
            codec.from_hex(digest_hex, 32, "digest"), descriptor)
        return {"digest": digest_hex, "format": fmt}

    def get_evidence(self, digest_hex):
        return self.node.store.get_blob(codec.from_hex(digest_hex, 32, "digest"))

    def store_audit(self):
        return self.node.store.audit_text()
