"""Deterministic state machine driven exclusively by ledger transactions.

Cases and events live in dense, zero-based id spaces. Every mutation is
validated in two phases so nothing reaches the ledger unless it would
apply cleanly: ``check`` raises on any violation without touching state,
``commit`` mutates and may assume ``check`` passed. ``apply`` chains the
two and is the replay path, so a rebuilt state is bit-identical to the
live one.

Check order is fixed: initialized -> referenced id exists -> permission
-> case/event status gates -> vocabulary membership -> timestamps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    AlreadyInitialized,
    BadRequest,
    CaseClosed,
    DuplicateKey,
    NotInitialized,
    PermissionDenied,
    TimestampRegression,
    UnknownCase,
    UnknownEvent,
    UnknownEventType,
    UnknownFunction,
    UnknownIdentity,
    UnknownStatus,
)
from .ledger import Transaction
from .registry import ROLE_AUDITOR, ROLE_INVESTIGATOR, IdentityRegistry

CASE_OPEN = "open"
CASE_CLOSED = "closed"
EVENT_ACTIVE = "active"
EVENT_DELETED = "deleted"

DEFAULT_CASE_STATUSES = (CASE_OPEN, CASE_CLOSED)
DEFAULT_EVENT_STATUSES = (EVENT_ACTIVE, EVENT_DELETED)
DEFAULT_EVENT_TYPES = (
    "identification",
    "collection-acquisition",
    "analysis",
    "reporting-discovery",
    "custody-transfer",
)

# functions whose transactions produce an alert notification; bootstrap
# transactions (f1, fX-register) are deliberately excluded
ALERTING_FUNCTIONS = frozenset(
    {"f2", "f3", "f4", "f5", "f6", "f12", "f13", "fX-custody"})


@dataclass
class Vocabulary:
    case_statuses: tuple[str, ...] = DEFAULT_CASE_STATUSES
    event_statuses: tuple[str, ...] = DEFAULT_EVENT_STATUSES
    event_types: tuple[str, ...] = DEFAULT_EVENT_TYPES

    def __post_init__(self):
        if CASE_OPEN not in self.case_statuses or CASE_CLOSED not in self.case_statuses:
            raise ValueError("case status vocabulary must include open and closed")
        if EVENT_DELETED not in self.event_statuses:
            raise ValueError("event status vocabulary must include deleted")


@dataclass
class Case:
    case_id: int
    name: str
    description: str
    responsible: bytes
    global_id: str
    created_at_ms: int
    case_hash: bytes            # immutable: no update function exists
    status: str
    investigators: list[bytes] = field(default_factory=list)
    event_ids: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "caseId": self.case_id,
            "name": self.name,
            "description": self.description,
            "responsible": self.responsible.hex(),
            "globalId": self.global_id,
            "createdAtMs": self.created_at_ms,
            "caseHash": self.case_hash.hex(),
            "status": self.status,
            "investigators": [k.hex() for k in self.investigators],
            "eventIds": list(self.event_ids),
        }


@dataclass
class Event:
    event_id: int
    case_id: int
    type: str
    description: str
    status: str
    evidence_hash: bytes
    created_at_ms: int
    custody: list[tuple[bytes, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "eventId": self.event_id,
            "caseId": self.case_id,
            "type": self.type,
            "description": self.description,
            "status": self.status,
            "evidenceHash": self.evidence_hash.hex(),
            "createdAtMs": self.created_at_ms,
            "custody": [{"owner": k.hex(), "timestampMs": ts} for k, ts in self.custody],
        }


@dataclass(frozen=True)
class AlertNotification:
    seq: int
    tx_id: bytes
    function: str
    case_id: int | None

    def to_dict(self) -> dict:
        out = {"seq": self.seq, "txId": self.tx_id.hex(), "functionCode": self.function}
        if self.case_id is not None:
            out["caseId"] = self.case_id
        return out


@dataclass(frozen=True)
class ApplyOutcome:
    result: int | None                   # new caseId / eventId where applicable
    alert: AlertNotification | None


class ForensicState:
    def __init__(self, admin_key: bytes, vocabulary: Vocabulary | None = None):
        self.vocabulary = vocabulary or Vocabulary()
        self.registry = IdentityRegistry(admin_key)
        self.initialized = False
        self.cases: list[Case] = []
        self.events: list[Event] = []
        self.alert_seq = 0
        self._checkers = {
            "f1": self._check_constructor,
            "fX-register": self._check_register,
            "f2": self._check_add_case,
            "f3": self._check_update_description,
            "f4": self._check_update_status,
            "f5": self._check_update_responsible,
            "f6": self._check_add_investigator,
            "f12": self._check_add_event,
            "f13": self._check_update_event_status,
            "fX-custody": self._check_custody_transfer,
        }
        self._committers = {
            "f1": self._commit_constructor,
            "fX-register": self._commit_register,
            "f2": self._commit_add_case,
            "f3": self._commit_update_description,
            "f4": self._commit_update_status,
            "f5": self._commit_update_responsible,
            "f6": self._commit_add_investigator,
            "f12": self._commit_add_event,
            "f13": self._commit_update_event_status,
            "fX-custody": self._commit_custody_transfer,
        }

    # -- transaction application ----------------------------------------

    def check(self, tx: Transaction) -> None:
        """Raise unless ``tx`` would apply cleanly; never mutates."""
        checker = self._checkers.get(tx.function)
        if checker is None:
            raise UnknownFunction(
                f"{tx.function} is not a state-mutating transaction")
        checker(tx)

    def commit(self, tx: Transaction) -> ApplyOutcome:
        """Mutate for a transaction that passed ``check``."""
        result, case_id = self._committers[tx.function](tx)
        alert = None
        if tx.function in ALERTING_FUNCTIONS:
            alert = AlertNotification(self.alert_seq, tx.tx_id, tx.function, case_id)
            self.alert_seq += 1
        return ApplyOutcome(result=result, alert=alert)

    def apply(self, tx: Transaction) -> ApplyOutcome:
        self.check(tx)
        return self.commit(tx)

    # -- helpers ----------------------------------------------------------

    def _require_initialized(self) -> None:
        if not self.initialized:
            raise NotInitialized("constructor (f1) has not run")

    def _case(self, case_id: int) -> Case:
        if case_id < 0 or case_id >= len(self.cases):
            raise UnknownCase(f"no case {case_id}")
        return self.cases[case_id]

    def _event(self, event_id: int) -> Event:
        if event_id < 0 or event_id >= len(self.events):
            raise UnknownEvent(f"no event {event_id}")
        return self.events[event_id]

    def _require_permission(self, tx: Transaction, case: Case | None = None,
                            event: Event | None = None) -> None:
        decision = self.registry.check_permission(
            tx.author_key, tx.function, case=case, event=event)
        if not decision.allowed:
            raise PermissionDenied(decision.reason)

    def _require_staff_identity(self, key: bytes, what: str):
        identity = self.registry.lookup(key)   # UnknownIdentity if absent
        if identity.role == ROLE_AUDITOR:
            raise BadRequest(f"{what} cannot hold the read-only auditor role")
        return identity

    # -- f1 constructor ---------------------------------------------------

    def _check_constructor(self, tx: Transaction) -> None:
        self._require_permission(tx)
        if self.initialized:
            raise AlreadyInitialized("constructor already ran")

    def _commit_constructor(self, tx: Transaction):
        self.initialized = True
        return None, None

    # -- fX-register ------------------------------------------------------

    def _check_register(self, tx: Transaction) -> None:
        self._require_initialized()
        self._require_permission(tx)
        role = tx.args["role"]
        key = tx.args["key"]
        if role not in ("prosecutor", "investigator", "auditor"):
            raise BadRequest(f"unknown role {role!r}")
        if self.registry.is_registered(key) or key == self.registry.admin_key:
            raise DuplicateKey(f"key {key.hex()} already registered")

    def _commit_register(self, tx: Transaction):
        self.registry.register(tx.args["key"], tx.args["role"],
                               tx.args["displayName"], tx.timestamp_ms)
        return None, None

    # -- f2 addCase ---------------------------------------------------------

    def _check_add_case(self, tx: Transaction) -> None:
        self._require_initialized()
        self._require_permission(tx)
        self._require_staff_identity(tx.args["responsible"], "responsible")

    def _commit_add_case(self, tx: Transaction):
        case = Case(
            case_id=len(self.cases),
            name=tx.args["name"],
            description=tx.args["description"],
            responsible=tx.args["responsible"],
            global_id=tx.args["globalId"],
            created_at_ms=tx.args["timestampMs"],
            case_hash=tx.args["hash"],
            status=CASE_OPEN,
            investigators=[tx.args["responsible"]],
        )
        self.cases.append(case)
        return case.case_id, case.case_id

    # -- f3 updateCaseDescription -------------------------------------------

    def _check_update_description(self, tx: Transaction) -> None:
        self._require_initialized()
        case = self._case(tx.args["caseId"])
        self._require_permission(tx, case=case)
        if case.status != CASE_OPEN:
            raise CaseClosed(f"case {case.case_id} is {case.status}")

    def _commit_update_description(self, tx: Transaction):
        case = self.cases[tx.args["caseId"]]
        case.description = tx.args["description"]
        return None, case.case_id

    # -- f4 updateCaseStatus --------------------------------------------------

    def _check_update_status(self, tx: Transaction) -> None:
        self._require_initialized()
        case = self._case(tx.args["caseId"])
        self._require_permission(tx, case=case)
        if tx.args["status"] not in self.vocabulary.case_statuses:
            raise UnknownStatus(f"case status {tx.args['status']!r} not in vocabulary")

    def _commit_update_status(self, tx: Transaction):
        case = self.cases[tx.args["caseId"]]
        case.status = tx.args["status"]
        return None, case.case_id

    # -- f5 updateResponsible ---------------------------------------------------

    def _check_update_responsible(self, tx: Transaction) -> None:
        self._require_initialized()
        case = self._case(tx.args["caseId"])
        self._require_permission(tx, case=case)
        self._require_staff_identity(tx.args["responsible"], "responsible")

    def _commit_update_responsible(self, tx: Transaction):
        case = self.cases[tx.args["caseId"]]
        new_key = tx.args["responsible"]
        case.responsible = new_key
        if new_key not in case.investigators:
            case.investigators.append(new_key)
        return None, case.case_id

    # -- f6 addInvestigatorCase ---------------------------------------------------

    def _check_add_investigator(self, tx: Transaction) -> None:
        self._require_initialized()
        case = self._case(tx.args["caseId"])
        self._require_permission(tx, case=case)
        identity = self.registry.lookup(tx.args["investigator"])
        if identity.role != ROLE_INVESTIGATOR:
            # stays within f6's declared error set
            raise UnknownIdentity(
                f"key {identity.key.hex()} is not registered with investigator role")

    def _commit_add_investigator(self, tx: Transaction):
        case = self.cases[tx.args["caseId"]]
        key = tx.args["investigator"]
        if key not in case.investigators:    # duplicate add is a no-op
            case.investigators.append(key)
        return None, case.case_id

    # -- f12 addEvent -----------------------------------------------------------

    def _check_add_event(self, tx: Transaction) -> None:
        self._require_initialized()
        case = self._case(tx.args["caseId"])
        self._require_permission(tx, case=case)
        if case.status != CASE_OPEN:
            raise CaseClosed(f"case {case.case_id} is {case.status}")
        if tx.args["type"] not in self.vocabulary.event_types:
            raise UnknownEventType(f"event type {tx.args['type']!r} not in vocabulary")
        if tx.args["status"] not in self.vocabulary.event_statuses:
            raise UnknownStatus(f"event status {tx.args['status']!r} not in vocabulary")

    def _commit_add_event(self, tx: Transaction):
        case = self.cases[tx.args["caseId"]]
        event = Event(
            event_id=len(self.events),
            case_id=case.case_id,
            type=tx.args["type"],
            description=tx.args["description"],
            status=tx.args["status"],
            evidence_hash=tx.args["hash"],
            created_at_ms=tx.args["timestampMs"],
            custody=[(tx.author_key, tx.args["timestampMs"])],
        )
        self.events.append(event)
        case.event_ids.append(event.event_id)
        return event.event_id, case.case_id

    # -- f13 updateEventStatus ------------------------------------------------------

    def _check_update_event_status(self, tx: Transaction) -> None:
        self._require_initialized()
        event = self._event(tx.args["eventId"])
        case = self.cases[event.case_id]
        self._require_permission(tx, case=case, event=event)
        if tx.args["status"] not in self.vocabulary.event_statuses:
            raise UnknownStatus(f"event status {tx.args['status']!r} not in vocabulary")

    def _commit_update_event_status(self, tx: Transaction):
        event = self.events[tx.args["eventId"]]
        event.status = tx.args["status"]
        return None, event.case_id

    # -- fX-custody recordCustodyTransfer ----------------------------------------------

    def _check_custody_transfer(self, tx: Transaction) -> None:
        self._require_initialized()
        event = self._event(tx.args["eventId"])
        case = self.cases[event.case_id]
        self._require_permission(tx, case=case, event=event)
        self.registry.lookup(tx.args["newOwner"])
        if event.custody and tx.args["timestampMs"] < event.custody[-1][1]:
            raise TimestampRegression(
                "custody timestamp precedes the current owner's timestamp")

    def _commit_custody_transfer(self, tx: Transaction):
        event = self.events[tx.args["eventId"]]
        event.custody.append((tx.args["newOwner"], tx.args["timestampMs"]))
        return None, event.case_id

    # -- accessors (Public; pure reads, no alerts) -------------------------

    def get_number_of_cases(self) -> int:                  # f7
        return len(self.cases)

    def get_case(self, case_id: int) -> Case:              # f8
        return self._case(case_id)

    def get_case_global_id(self, case_id: int) -> str:     # f9
        return self._case(case_id).global_id

    def get_number_of_investigators(self, case_id: int) -> int:   # f10
        return len(self._case(case_id).investigators)

    def get_case_hash(self, case_id: int) -> bytes:        # f11
        return self._case(case_id).case_hash

    def get_number_of_events_case(self, case_id: int) -> int:     # f14
        return len(self._case(case_id).event_ids)

    def get_events_case(self, case_id: int) -> list[Event]:       # f15
        case = self._case(case_id)
        return [self.events[i] for i in case.event_ids]

    def get_global_number_of_events(self) -> int:          # f16
        return len(self.events)

    def get_event(self, event_id: int) -> Event:           # f17
        return self._event(event_id)

    def get_event_hash(self, event_id: int) -> bytes:      # f18
        return self._event(event_id).evidence_hash

    # -- canonical dump -----------------------------------------------------

    def canonical_dump(self) -> str:
        """Deterministic text rendering for replay-diff testing.

        One JSON array per line, cases then events in id order, fields in
        declared order, digests as hex, investigator keys sorted.
        """
        lines = []
        for c in self.cases:
            lines.append(json.dumps([
                "case", c.case_id, c.name, c.description, c.responsible.hex(),
                c.global_id, c.created_at_ms, c.case_hash.hex(), c.status,
                sorted(k.hex() for k in c.investigators), c.event_ids,
            ], separators=(",", ":"), ensure_ascii=True))
        for e in self.events:
            lines.append(json.dumps([
                "event", e.event_id, e.case_id, e.type, e.description, e.status,
                e.evidence_hash.hex(), e.created_at_ms,
                [[k.hex(), ts] for k, ts in e.custody],
            ], separators=(",", ":"), ensure_ascii=True))
        return "\n".join(lines) + ("\n" if lines else "")
