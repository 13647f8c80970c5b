#!/usr/bin/env python3
"""Build (or rebuild) the GoldenBank embezzlement demo fixture.

Generates keyfiles (only if missing, so committed keys stay stable),
deterministic evidence files, descriptors, the evidence-directory
tarball, and scenario.json with the frozen expected state dump.

Run from the repository root:  python scripts/build_malory_fixture.py
"""

from __future__ import annotations

import hashlib
import io
import json
import random
import sys
import tarfile
import tempfile
from pathlib import Path

REPO = Path(__file__).parent.parent
sys.path.insert(0, str(REPO / "src"))

from custodia.invoker import LocalInvoker         # noqa: E402
from custodia.keys import KeyPair                 # noqa: E402
from custodia.node import create_data_dir, open_node   # noqa: E402
from custodia.scenario import load_scenario       # noqa: E402

FIXTURE = REPO / "scenarios" / "malory"

DAY_MS = 86_400_000
T_INIT = 1_596_441_600_000            # 2020-08-03T08:00:00Z
T_CASE = 1_596_445_200_000            # 09:00
DAY1 = 1_596_448_800_000              # 10:00

IDENTITIES = [
    ("prosecutor", "prosecutor", "District Prosecutor", T_INIT + 10_000),
    ("audit-lead", "investigator", "Internal Audit Lead", T_INIT + 20_000),
    ("it-forensics", "investigator", "IT Forensics Analyst", T_INIT + 30_000),
    ("compliance", "auditor", "Compliance Auditor", T_INIT + 40_000),
]

# (day, kind, filename, type, description)
EVENTS = [
    (1, "cctv", "day1_cctv.bin", "collection-acquisition",
     "CCTV Day 1: unauthorised cash withdrawal of 700 $ from Alice"),
    (1, "journal", "day1_withdrawal.csv", "analysis",
     "Journal entry Day 1: unauthorised cash withdrawal of 700 $ from the savings account of Alice"),
    (1, "journal", "day1_deposit.csv", "analysis",
     "Journal entry Day 1: unauthorised cash deposit of 500 $ to the savings account of Bob; 200 $ cash difference unaccounted"),
    (2, "cctv", "day2_cctv.bin", "collection-acquisition",
     "CCTV Day 2: unauthorised cash withdrawal of 500 $ from Bob"),
    (2, "journal", "day2_withdrawal.csv", "analysis",
     "Journal entry Day 2: unauthorised cash withdrawal of 500 $ from the savings account of Bob"),
    (2, "journal", "day2_deposit.csv", "analysis",
     "Journal entry Day 2: unauthorised cash deposit of 500 $ to the savings account of Claire"),
    (3, "cctv", "day3_cctv.bin", "collection-acquisition",
     "CCTV Day 3: unauthorised cash withdrawal of 400 $ from Claire"),
    (3, "journal", "day3_withdrawal.csv", "analysis",
     "Journal entry Day 3: unauthorised cash withdrawal of 400 $ from the savings account of Claire"),
    (3, "journal", "day3_deposit.csv", "analysis",
     "Journal entry Day 3: unauthorised cash deposit of 300 $ to the savings account of Alice; 100 $ cash difference unaccounted"),
]

JOURNAL_ROWS = {
    "day1_withdrawal.csv": ("JRN-0803-0114", "2020-08-03", "SAV-004711", "Alice",
                            "cash-withdrawal", 700),
    "day1_deposit.csv": ("JRN-0803-0115", "2020-08-03", "SAV-004852", "Bob",
                         "cash-deposit", 500),
    "day2_withdrawal.csv": ("JRN-0804-0088", "2020-08-04", "SAV-004852", "Bob",
                            "cash-withdrawal", 500),
    "day2_deposit.csv": ("JRN-0804-0089", "2020-08-04", "SAV-005190", "Claire",
                         "cash-deposit", 500),
    "day3_withdrawal.csv": ("JRN-0805-0152", "2020-08-05", "SAV-005190", "Claire",
                            "cash-withdrawal", 400),
    "day3_deposit.csv": ("JRN-0805-0153", "2020-08-05", "SAV-004711", "Alice",
                         "cash-deposit", 300),
}


def keyfile(name: str) -> KeyPair:
    path = FIXTURE / "keys" / f"{name}.key"
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists():
        return KeyPair.load(path)
    pair = KeyPair.generate()
    pair.save(path)
    return pair


def write_evidence() -> None:
    evidence = FIXTURE / "evidence"
    evidence.mkdir(parents=True, exist_ok=True)
    for day in (1, 2, 3):
        rng = random.Random(f"goldenbank-cctv-day{day}")
        header = f"CCTV-EXPORT branch=albany-central camera=cash-desk-1 day={day}\n"
        (evidence / f"day{day}_cctv.bin").write_bytes(
            header.encode() + rng.randbytes(4096))
    header = ("entry_id,entry_date,account,holder,operation,amount_usd,"
              "teller_station,voucher,note\n")
    for filename, (entry, date, account, holder, op, amount) in JOURNAL_ROWS.items():
        row = (f"{entry},{date},{account},{holder},{op},{amount},"
               f"desk-1,missing,cancel-transaction markdown present\n")
        (evidence / filename).write_text(header + row)


def write_descriptors() -> None:
    descriptors = FIXTURE / "descriptors"
    descriptors.mkdir(parents=True, exist_ok=True)
    for day, kind, filename, _type, _desc in EVENTS:
        content = (FIXTURE / "evidence" / filename).read_bytes()
        subject = hashlib.sha256(content).hexdigest()
        if kind == "cctv":
            doc = {
                "format": "json",
                "subject": subject,
                "entries": {
                    "source": "branch surveillance system",
                    "camera": "cash-desk-1",
                    "day": str(day),
                    "received_via": "USB from Surveillance Department",
                },
            }
            (descriptors / f"{filename}.desc.json").write_text(
                json.dumps(doc, indent=2) + "\n")
        else:
            rows = [("key", "value"),
                    ("source", "core banking system"),
                    ("extract", "journal of entries"),
                    ("day", str(day)),
                    ("provided_by", "IT department"),
                    ("subject_sha256", subject)]
            (descriptors / f"{filename}.desc.csv").write_text(
                "\n".join(f"{k},{v}" for k, v in rows) + "\n")


def build_tarball() -> None:
    """Deterministic tar of evidence/: sorted entries, zeroed metadata."""
    evidence = FIXTURE / "evidence"
    buffer = io.BytesIO()
    with tarfile.open(fileobj=buffer, mode="w", format=tarfile.USTAR_FORMAT) as tar:
        for path in sorted(evidence.iterdir()):
            info = tarfile.TarInfo(name=f"evidence/{path.name}")
            content = path.read_bytes()
            info.size = len(content)
            info.mtime = 0
            info.uid = info.gid = 0
            info.uname = info.gname = ""
            info.mode = 0o644
            tar.addfile(info, io.BytesIO(content))
    (FIXTURE / "evidence.tar").write_bytes(buffer.getvalue())


def build_scenario(expected_state: list[str] | None) -> dict:
    script = [{
        "op": "addCase",
        "signer": "prosecutor",
        "timestampMs": T_CASE,
        "args": {
            "name": "GoldenBank embezzlement",
            "description": ("Unauthorised withdrawals from elderly clients' savings "
                            "accounts at the Albany central branch of Golden Bank; "
                            "suspect: head teller Malory"),
            "responsible": "@audit-lead",
            "globalId": "GB-2020-0042",
            "hashFile": "evidence.tar",
        },
    }]
    for index, (day, kind, filename, etype, description) in enumerate(EVENTS):
        ts = DAY1 + (day - 1) * DAY_MS + (index % 3) * 300_000
        descriptor = (f"descriptors/{filename}.desc."
                      + ("json" if kind == "cctv" else "csv"))
        script.append({
            "op": "addEvent",
            "signer": "audit-lead",
            "timestampMs": ts,
            "args": {
                "caseId": 0,
                "type": etype,
                "description": description,
                "status": "active",
                "evidenceFile": f"evidence/{filename}",
                "descriptorFile": descriptor,
            },
        })
    doc = {
        "name": "goldenbank-embezzlement",
        "adminKeyfile": "keys/admin.key",
        "initTimestampMs": T_INIT,
        "identities": [
            {"id": ident, "keyfile": f"keys/{ident}.key", "role": role,
             "name": name, "timestampMs": ts}
            for ident, role, name, ts in IDENTITIES
        ],
        "script": script,
    }
    if expected_state is not None:
        doc["expectedState"] = expected_state
    return doc


def freeze_expected_state() -> list[str]:
    with tempfile.TemporaryDirectory() as tmp:
        admin = KeyPair.load(FIXTURE / "keys" / "admin.key")
        cfg = create_data_dir(Path(tmp) / "node", admin.public)
        node = open_node(cfg)
        result = load_scenario(FIXTURE, LocalInvoker(node))
        node.close()
        assert result.chain_ok, "fixture must verify"
        assert result.cases == 1 and result.events == 9, (result.cases, result.events)
        return result.dump.rstrip("\n").split("\n")


def main() -> None:
    keyfile("admin")
    for ident, _, _, _ in IDENTITIES:
        keyfile(ident)
    write_evidence()
    write_descriptors()
    build_tarball()
    scenario_path = FIXTURE / "scenario.json"
    scenario_path.write_text(json.dumps(build_scenario(None), indent=2) + "\n")
    expected = freeze_expected_state()
    scenario_path.write_text(json.dumps(build_scenario(expected), indent=2) + "\n")

    # fresh reload must reproduce the frozen dump exactly
    with tempfile.TemporaryDirectory() as tmp:
        admin = KeyPair.load(FIXTURE / "keys" / "admin.key")
        cfg = create_data_dir(Path(tmp) / "check", admin.public)
        node = open_node(cfg)
        result = load_scenario(FIXTURE, LocalInvoker(node))
        node.close()
    assert result.state_matches, "frozen expected state failed to reproduce"
    print(f"fixture ready: {result.cases} case, {result.events} events, "
          f"chain {'OK' if result.chain_ok else 'FAILED'}")
    print(f"case hash (evidence.tar): "
          f"{hashlib.sha256((FIXTURE / 'evidence.tar').read_bytes()).hexdigest()}")


if __name__ == "__main__":
    main()
