"""HTTP client implementing the invoker surface against a running service."""

from __future__ import annotations

import json
import time
from typing import Iterator

import httpx

from . import codec, functions, wire
from .errors import ConnectionFailed, CustodiaError, error_for_code
from .keys import KeyPair
from .ledger import build_transaction
from .node import now_ms


class HttpInvoker:
    """Signs request envelopes and transaction preimages client-side;
    the server never holds a caller's secret key."""

    def __init__(self, base_url: str = "", timeout: float = 10.0,
                 client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self._client = client or httpx.Client(base_url=self.base_url, timeout=timeout)
        self._last_nonce = 0

    def close(self) -> None:
        self._client.close()

    def _next_nonce(self) -> int:
        # wall-clock nanoseconds, forced strictly increasing per client
        nonce = max(time.time_ns(), self._last_nonce + 1)
        self._last_nonce = nonce
        return nonce

    def _request(self, method: str, path: str, **kwargs) -> httpx.Response:
        try:
            response = self._client.request(method, path, **kwargs)
        except httpx.HTTPError as exc:
            raise ConnectionFailed(f"{method} {path}: {exc}") from None
        if response.status_code >= 400:
            try:
                doc = response.json()
            except ValueError:
                doc = {}
            raise error_for_code(doc.get("code", "InternalError"),
                                 doc.get("message", response.text))
        return response

    def _mutate(self, method: str, path: str, signer: KeyPair, function: str,
                args: dict, timestamp_ms: int | None) -> dict:
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        tx = build_transaction(signer, function, args, ts)
        body = {
            "function": function,
            "args": functions.args_to_wire(functions.get(function), tx.args),
            "timestampMs": ts,
            "txSignature": tx.signature.hex(),
        }
        envelope = wire.envelope_for(signer, method, path, body, self._next_nonce())
        return self._request(method, path, json=envelope).json()

    # -- mutations ------------------------------------------------------------

    def init(self, signer, timestamp_ms=None):
        return self._mutate("POST", "/v1/init", signer, "f1", {}, timestamp_ms)

    def register_identity(self, signer, key_hex, role, display_name,
                          timestamp_ms=None):
        return self._mutate("POST", "/v1/identities", signer, "fX-register", {
            "key": codec.from_hex(key_hex, 32, "key"),
            "role": role,
            "displayName": display_name,
        }, timestamp_ms)

    def add_case(self, signer, name, description, responsible_hex, global_id,
                 case_hash_hex, timestamp_ms=None):
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        doc = self._mutate("POST", "/v1/cases", signer, "f2", {
            "name": name,
            "description": description,
            "responsible": codec.from_hex(responsible_hex, 32, "responsible"),
            "globalId": global_id,
            "timestampMs": ts,
            "hash": codec.from_hex(case_hash_hex, 32, "hash"),
        }, ts)
        doc.setdefault("caseId", doc.get("result"))
        return doc

    def update_case_description(self, signer, case_id, description,
                                timestamp_ms=None):
        return self._mutate("PATCH", f"/v1/cases/{case_id}", signer, "f3",
                            {"caseId": case_id, "description": description},
                            timestamp_ms)

    def update_case_status(self, signer, case_id, status, timestamp_ms=None):
        return self._mutate("PATCH", f"/v1/cases/{case_id}", signer, "f4",
                            {"caseId": case_id, "status": status}, timestamp_ms)

    def update_case_responsible(self, signer, case_id, responsible_hex,
                                timestamp_ms=None):
        return self._mutate("PATCH", f"/v1/cases/{case_id}", signer, "f5", {
            "caseId": case_id,
            "responsible": codec.from_hex(responsible_hex, 32, "responsible"),
        }, timestamp_ms)

    def add_case_investigator(self, signer, case_id, investigator_hex,
                              timestamp_ms=None):
        return self._mutate("POST", f"/v1/cases/{case_id}/investigators", signer,
                            "f6", {
                                "caseId": case_id,
                                "investigator": codec.from_hex(
                                    investigator_hex, 32, "investigator"),
                            }, timestamp_ms)

    def add_event(self, signer, case_id, event_type, description, status,
                  evidence_hash_hex, timestamp_ms=None):
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        doc = self._mutate("POST", f"/v1/cases/{case_id}/events", signer, "f12", {
            "caseId": case_id,
            "type": event_type,
            "description": description,
            "status": status,
            "hash": codec.from_hex(evidence_hash_hex, 32, "hash"),
            "timestampMs": ts,
        }, ts)
        doc.setdefault("eventId", doc.get("result"))
        return doc

    def update_event_status(self, signer, event_id, status, timestamp_ms=None):
        return self._mutate("PATCH", f"/v1/events/{event_id}", signer, "f13",
                            {"eventId": event_id, "status": status}, timestamp_ms)

    def transfer_custody(self, signer, event_id, new_owner_hex, timestamp_ms=None):
        ts = timestamp_ms if timestamp_ms is not None else now_ms()
        return self._mutate("PATCH", f"/v1/events/{event_id}", signer, "fX-custody", {
            "eventId": event_id,
            "newOwner": codec.from_hex(new_owner_hex, 32, "newOwner"),
            "timestampMs": ts,
        }, ts)

    # -- reads -------------------------------------------------------------------

    def stats(self):
        return self._request("GET", "/v1/stats").json()

    def list_cases(self):
        return self._request("GET", "/v1/cases").json()

    def get_case(self, case_id):
        return self._request("GET", f"/v1/cases/{case_id}").json()

    def list_case_events(self, case_id):
        return self._request("GET", f"/v1/cases/{case_id}/events").json()

    def get_event(self, event_id):
        return self._request("GET", f"/v1/events/{event_id}").json()

    def identities(self):
        return self._request("GET", "/v1/identities").json()

    def verify(self):
        return self._request("GET", "/v1/verify").json()

    def state_dump(self):
        return self._request("GET", "/v1/dump").text

    def meta(self):
        return self._request("GET", "/v1/meta").json()

    def put_evidence(self, content):
        return self._request("POST", "/v1/evidence", content=content).json()

    def attach_descriptor(self, digest_hex, fmt, raw):
        return self._request("POST", f"/v1/evidence/{digest_hex}/descriptor",
                             params={"format": fmt}, content=raw).json()

    def get_evidence(self, digest_hex):
        return self._request("GET", f"/v1/evidence/{digest_hex}").content

    def store_audit(self):
        return self._request("GET", "/v1/store/audit").text

    def alerts(self) -> Iterator[dict]:
        """Follow the server-push alert stream; yields alert documents."""
        try:
            with self._client.stream("GET", "/v1/alerts", timeout=None) as response:
                event_name = None
                for line in response.iter_lines():
                    if line.startswith("event:"):
                        event_name = line.split(":", 1)[1].strip()
                    elif line.startswith("data:"):
                        payload = line.split(":", 1)[1].strip()
                        if event_name == "overflow":
                            raise CustodiaError("alert stream overflowed; re-query state")
                        if event_name == "alert":
                            yield json.loads(payload)
                        event_name = None
        except httpx.HTTPError as exc:
            raise ConnectionFailed(f"alert stream: {exc}") from None
