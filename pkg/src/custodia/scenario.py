"""Scenario fixtures: scripted identities + operations + expected end state.

A fixture directory holds ``scenario.json``, the referenced keyfiles and
evidence files. Timestamps are scripted rather than taken from the wall
clock, so two loads of the same fixture produce identical block hashes
and identical canonical state dumps on any machine.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import BadRequest
from .invoker import Invoker
from .keys import KeyPair
from .store import EvidenceDescriptor


@dataclass
class LoadResult:
    name: str
    cases: int
    events: int
    chain_ok: bool
    state_matches: bool | None      # None when the fixture carries no expected dump
    dump: str

    def summary(self) -> str:
        parts = [f"scenario {self.name!r} loaded:",
                 f"{self.cases} case(s), {self.events} event(s),",
                 "chain OK" if self.chain_ok else "chain FAILED"]
        if self.state_matches is not None:
            parts.append("state matches fixture" if self.state_matches
                         else "state DIFFERS from fixture")
        return " ".join(parts)


class ScenarioFixture:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        doc_path = self.directory / "scenario.json"
        if not doc_path.exists():
            raise BadRequest(f"no scenario.json under {self.directory}")
        self.doc = json.loads(doc_path.read_text())
        self.name = self.doc.get("name", self.directory.name)
        self.admin = KeyPair.load(self.directory / self.doc["adminKeyfile"])
        self.identities: dict[str, tuple[KeyPair, dict]] = {}
        for entry in self.doc.get("identities", []):
            pair = KeyPair.load(self.directory / entry["keyfile"])
            self.identities[entry["id"]] = (pair, entry)
        for entry in self.doc.get("script", []):
            signer = entry.get("signer")
            if signer not in self.identities and signer != "admin":
                raise BadRequest(f"script references unknown signer {signer!r}")

    def signer(self, ident: str) -> KeyPair:
        if ident == "admin":
            return self.admin
        return self.identities[ident][0]

    def key_hex(self, ref: str) -> str:
        """Resolve "@id" references to the identity's public key hex."""
        if ref.startswith("@"):
            ident = ref[1:]
            if ident == "admin":
                return self.admin.public.hex()
            if ident not in self.identities:
                raise BadRequest(f"unknown identity reference {ref!r}")
            return self.identities[ident][0].public.hex()
        return ref

    def expected_dump(self) -> str | None:
        expected = self.doc.get("expectedState")
        if expected is None:
            return None
        if isinstance(expected, list):
            return "\n".join(expected) + "\n"
        return expected


def _file_digest_hex(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def load_scenario(directory: str | Path, invoker: Invoker) -> LoadResult:
    """Run the fixture bootstrap and script against ``invoker``.

    Evidence files are stored through the invoker (content-addressed) and
    their digests become the on-ledger hashes; descriptor files ride along.
    """
    fixture = ScenarioFixture(directory)
    doc = fixture.doc

    invoker.init(fixture.admin, timestamp_ms=doc.get("initTimestampMs", 0))
    for ident, (pair, entry) in fixture.identities.items():
        invoker.register_identity(
            fixture.admin, pair.public.hex(), entry["role"], entry["name"],
            timestamp_ms=entry.get("timestampMs", 0))

    for step in doc.get("script", []):
        _run_step(fixture, invoker, step)

    stats = invoker.stats()
    verification = invoker.verify()
    dump = invoker.state_dump()
    expected = fixture.expected_dump()
    return LoadResult(
        name=fixture.name,
        cases=stats["cases"],
        events=stats["events"],
        chain_ok=bool(verification.get("ok")),
        state_matches=None if expected is None else dump == expected,
        dump=dump,
    )


def _resolve_hash(fixture: ScenarioFixture, invoker: Invoker, args: dict,
                  file_key: str) -> str:
    """File reference -> stored blob digest; literal hash passes through."""
    if file_key in args:
        path = fixture.directory / args[file_key]
        content = path.read_bytes()
        digest_hex = invoker.put_evidence(content)["digest"]
        descriptor_file = args.get("descriptorFile")
        if descriptor_file:
            desc_path = fixture.directory / descriptor_file
            fmt = "csv" if desc_path.suffix == ".csv" else "json"
            EvidenceDescriptor.from_bytes(fmt, desc_path.read_bytes())
            invoker.attach_descriptor(digest_hex, fmt, desc_path.read_bytes())
        return digest_hex
    return args["hash"]


def _run_step(fixture: ScenarioFixture, invoker: Invoker, step: dict) -> None:
    op = step.get("op")
    signer = fixture.signer(step["signer"])
    ts = step.get("timestampMs")
    args = dict(step.get("args", {}))

    if op == "addCase":
        invoker.add_case(
            signer, args["name"], args["description"],
            fixture.key_hex(args["responsible"]), args["globalId"],
            _resolve_hash(fixture, invoker, args, "hashFile"), timestamp_ms=ts)
    elif op == "addEvent":
        invoker.add_event(
            signer, args["caseId"], args["type"], args["description"],
            args["status"],
            _resolve_hash(fixture, invoker, args, "evidenceFile"), timestamp_ms=ts)
    elif op == "updateCaseDescription":
        invoker.update_case_description(signer, args["caseId"],
                                        args["description"], timestamp_ms=ts)
    elif op == "updateCaseStatus":
        invoker.update_case_status(signer, args["caseId"], args["status"],
                                   timestamp_ms=ts)
    elif op == "updateResponsible":
        invoker.update_case_responsible(
            signer, args["caseId"], fixture.key_hex(args["responsible"]),
            timestamp_ms=ts)
    elif op == "addInvestigator":
        invoker.add_case_investigator(
            signer, args["caseId"], fixture.key_hex(args["investigator"]),
            timestamp_ms=ts)
    elif op == "updateEventStatus":
        invoker.update_event_status(signer, args["eventId"], args["status"],
                                    timestamp_ms=ts)
    elif op == "transferCustody":
        invoker.transfer_custody(signer, args["eventId"],
                                 fixture.key_hex(args["newOwner"]), timestamp_ms=ts)
    else:
        raise BadRequest(f"unknown scenario op {op!r}")
