"""Courtroom-facing audit report, derived purely from ledger replay.

Nothing in the report depends on live in-memory state, wall clocks or
local paths, so regenerating it from a copied ledger file on another
machine yields byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CorruptChain, UnknownCase
from .ledger import Ledger
from .state import ForensicState, Vocabulary
from .store import EvidenceStore


@dataclass
class AuditReport:
    chain_ok: bool
    block_count: int
    cases: list[dict] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    authorship: list[dict] = field(default_factory=list)
    anomalies: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chainOk": self.chain_ok,
            "blocks": self.block_count,
            "caseSummaries": self.cases,
            "custodyTimelines": self.events,
            "authorship": self.authorship,
            "anomalies": self.anomalies,
        }

    def render_text(self) -> str:
        lines = ["CUSTODIA AUDIT REPORT",
                 f"chain: {'OK' if self.chain_ok else 'FAILED'} ({self.block_count} blocks)",
                 f"cases: {len(self.cases)}"]
        for c in self.cases:
            lines.append(
                f"case {c['caseId']} name={c['name']!r} status={c['status']} "
                f"responsible={c['responsible']} investigators={c['investigatorCount']} "
                f"events={c['eventCount']} hash={c['caseHash']}")
        for e in self.events:
            lines.append(
                f"  event {e['eventId']} case={e['caseId']} type={e['type']} "
                f"status={e['status']} digest={e['evidenceHash']}")
            for hop in e["custody"]:
                lines.append(f"    custody {hop['owner']} @ {hop['timestampMs']}")
        lines.append("authorship:")
        for entry in self.authorship:
            lines.append(
                f"  block {entry['height']} {entry['functionCode']} "
                f"author={entry['author']} tx={entry['txId']}")
        if self.anomalies:
            lines.append("anomalies:")
            lines.extend(f"  {a}" for a in self.anomalies)
        else:
            lines.append("anomalies: none")
        return "\n".join(lines) + "\n"


def build_report(ledger: Ledger, admin_key: bytes,
                 vocabulary: Vocabulary | None = None,
                 case_id: int | None = None,
                 store: EvidenceStore | None = None) -> AuditReport:
    """Replay the chain into a fresh state and summarize it.

    ``case_id`` narrows the report to one case; ``store`` adds a
    ledger/storage consistency section (off by default to keep the
    report a pure function of the ledger file).
    """
    report_state = ForensicState(admin_key, vocabulary)
    authorship: list[dict] = []

    def handler(tx):
        height = len(authorship)
        report_state.apply(tx)
        authorship.append({
            "height": height,
            "functionCode": tx.function,
            "author": tx.author_key.hex(),
            "txId": tx.tx_id.hex(),
        })

    try:
        ledger.replay(handler)
    except CorruptChain:
        verification = ledger.verify()
        return AuditReport(
            chain_ok=False, block_count=verification.block_count,
            anomalies=[f"chain verification failed at height "
                       f"{verification.first_bad_height} ({verification.failure_kind})"])

    if case_id is not None and (case_id < 0 or case_id >= len(report_state.cases)):
        raise UnknownCase(f"no case {case_id}")

    wanted = ([report_state.cases[case_id]] if case_id is not None
              else report_state.cases)
    report = AuditReport(chain_ok=True, block_count=ledger.chain_length())
    for c in wanted:
        report.cases.append({
            "caseId": c.case_id,
            "name": c.name,
            "status": c.status,
            "responsible": c.responsible.hex(),
            "caseHash": c.case_hash.hex(),
            "investigatorCount": len(c.investigators),
            "eventCount": len(c.event_ids),
        })
        for event_id in c.event_ids:
            e = report_state.events[event_id]
            report.events.append({
                "eventId": e.event_id,
                "caseId": e.case_id,
                "type": e.type,
                "status": e.status,
                "evidenceHash": e.evidence_hash.hex(),
                "custody": [{"owner": k.hex(), "timestampMs": ts}
                            for k, ts in e.custody],
            })
    report.authorship = authorship

    if store is not None:
        for e in report_state.events:
            if e.status == "deleted":
                continue
            if not store.has_blob(e.evidence_hash):
                report.anomalies.append(
                    f"active event {e.event_id} evidence {e.evidence_hash.hex()} "
                    f"not present in the store and not marked external")
        for line in store.audit():
            if line.status == "CORRUPT":
                report.anomalies.append(f"store blob {line.digest.hex()} is CORRUPT")
    return report
