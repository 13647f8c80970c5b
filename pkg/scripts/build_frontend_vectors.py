#!/usr/bin/env python3
"""Regenerate the dashboard test fixtures.

frontend/tests/fixtures.json — real /v1 responses captured from a
service with the demo scenario loaded.
frontend/tests/vectors.json — canonical-encoding and signing vectors
(fixed seed) the TypeScript signing code must reproduce byte for byte.

Run from the repository root: python scripts/build_frontend_vectors.py
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).parent.parent
sys.path.insert(0, str(REPO / "src"))

from fastapi.testclient import TestClient          # noqa: E402

from custodia import functions, wire               # noqa: E402
from custodia.invoker import LocalInvoker          # noqa: E402
from custodia.keys import KeyPair                  # noqa: E402
from custodia.ledger import build_transaction      # noqa: E402
from custodia.node import create_data_dir, open_node   # noqa: E402
from custodia.scenario import load_scenario        # noqa: E402
from custodia.service import create_app            # noqa: E402

FIXTURE = REPO / "scenarios" / "malory"
OUT = REPO / "frontend" / "tests"


def capture_fixture_responses() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        admin = KeyPair.load(FIXTURE / "keys" / "admin.key")
        cfg = create_data_dir(Path(tmp) / "node", admin.public)
        node = open_node(cfg)
        load_scenario(FIXTURE, LocalInvoker(node))
        client = TestClient(create_app(node))
        captured = {
            "stats": client.get("/v1/stats").json(),
            "cases": client.get("/v1/cases").json(),
            "case0": client.get("/v1/cases/0").json(),
            "case0events": client.get("/v1/cases/0/events").json(),
            "event0": client.get("/v1/events/0").json(),
            "meta": client.get("/v1/meta").json(),
            "verify": client.get("/v1/verify").json(),
        }
        (OUT / "fixtures.json").write_text(json.dumps(captured, indent=2) + "\n")
        node.close()


def build_signing_vectors() -> None:
    seed = bytes(range(32))
    pair = KeyPair.generate(seed)
    ts = 1_596_708_600_000
    args = {"caseId": 0, "type": "analysis",
            "description": "dashboard submission", "status": "active",
            "hash": bytes.fromhex("cd" * 32), "timestampMs": ts}
    tx = build_transaction(pair, "f12", args, ts)
    body = {"function": "f12",
            "args": functions.args_to_wire(functions.get("f12"), tx.args),
            "timestampMs": ts, "txSignature": tx.signature.hex()}
    body_bytes = wire.canonical_json(body)
    request_pre = wire.request_preimage("POST", "/v1/cases/0/events", body_bytes, 77)
    vectors = {
        "seedHex": seed.hex(),
        "publicHex": pair.public.hex(),
        "f12": {
            "args": {"caseId": 0, "type": "analysis",
                     "description": "dashboard submission", "status": "active",
                     "hash": "cd" * 32, "timestampMs": ts},
            "timestampMs": ts,
            "preimageHex": tx.preimage().hex(),
            "txIdHex": tx.tx_id.hex(),
            "signatureHex": tx.signature.hex(),
        },
        "envelope": {
            "method": "POST", "path": "/v1/cases/0/events", "nonce": 77,
            "canonicalBody": body_bytes.decode(),
            "preimageHex": request_pre.hex(),
        },
    }
    (OUT / "vectors.json").write_text(json.dumps(vectors, indent=2) + "\n")


if __name__ == "__main__":
    capture_fixture_responses()
    build_signing_vectors()
    print(f"wrote {OUT / 'fixtures.json'} and {OUT / 'vectors.json'}")
