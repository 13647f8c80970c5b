"""HTTP service exposing the forensic operations, evidence transfer,
chain verification and the alert stream under /v1.

Read routes are public. Mutating routes accept a signed envelope whose
body carries the transaction material (function, args, timestamp, tx
signature); the service never signs on a caller's behalf. Startup
refuses to serve a chain that fails verification.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterator

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import codec, functions, wire
from .alerts import OVERFLOW
from .errors import (
    BadRequest,
    CorruptChainAtStartup,
    CustodiaError,
    NonceReplay,
)
from .keys import verify_signature
from .ledger import Transaction
from .node import CustodyNode
from .store import EvidenceDescriptor

API_PREFIX = "/v1"

ROUTE_FUNCTIONS = {
    "init": ("f1",),
    "cases_create": ("f2",),
    "cases_patch": ("f3", "f4", "f5"),
    "investigators": ("f6",),
    "events_create": ("f12",),
    "events_patch": ("f13", "fX-custody"),
    "identities": ("fX-register",),
}


class Envelope(BaseModel):
    body: dict
    callerKey: str
    nonce: int = Field(ge=0)
    signature: str


class NonceLedger:
    """Per-caller strictly-increasing nonce watermarks (in-memory).

    Only accepted envelopes advance the watermark, so a denied or failed
    request may be retried while a previously accepted envelope can
    never be replayed.
    """

    def __init__(self):
        self._last: dict[bytes, int] = {}
        self.lock = threading.Lock()

    def check(self, caller: bytes, nonce: int) -> None:
        last = self._last.get(caller)
        if last is not None and nonce <= last:
            raise NonceReplay(
                f"nonce {nonce} does not exceed the last accepted {last}")

    def commit(self, caller: bytes, nonce: int) -> None:
        self._last[caller] = nonce


def create_app(node: CustodyNode, static_dir: str | Path | None = None) -> FastAPI:
    startup_report = node.verify()
    if not startup_report.ok:
        raise CorruptChainAtStartup(
            f"chain fails verification at height {startup_report.first_bad_height} "
            f"({startup_report.failure_kind})")

    app = FastAPI(title="custodia", docs_url=None, redoc_url=None)
    nonces = NonceLedger()

    @app.exception_handler(CustodiaError)
    async def _custodia_error(_request: Request, exc: CustodiaError):
        return JSONResponse(status_code=exc.http_status,
                            content={"code": exc.code, "message": exc.message})

    def submit_envelope(request: Request, envelope: Envelope, route: str):
        allowed = ROUTE_FUNCTIONS[route]
        body = envelope.body
        function = body.get("function")
        if function not in allowed:
            raise BadRequest(f"route accepts {allowed}, body names {function!r}")
        spec = functions.get(function)
        try:
            caller = codec.from_hex(envelope.callerKey, codec.KEY_LEN, "callerKey")
            env_sig = codec.from_hex(envelope.signature, codec.SIGNATURE_LEN,
                                     "envelope signature")
            tx_sig = codec.from_hex(body.get("txSignature", ""),
                                    codec.SIGNATURE_LEN, "txSignature")
        except ValueError as exc:
            raise BadRequest(str(exc)) from None
        preimage = wire.request_preimage(request.method, request.url.path,
                                         wire.canonical_json(body), envelope.nonce)
        verify_signature(caller, preimage, env_sig)

        timestamp_ms = body.get("timestampMs")
        if not isinstance(timestamp_ms, int) or timestamp_ms < 0:
            raise BadRequest("body must carry an unsigned timestampMs")
        args = functions.args_from_wire(spec, body.get("args", {}))
        tx = Transaction(function=spec.name, args=args, author_key=caller,
                         timestamp_ms=timestamp_ms, signature=tx_sig)
        with nonces.lock:
            nonces.check(caller, envelope.nonce)
            outcome = node.submit(tx)
            nonces.commit(caller, envelope.nonce)
        return outcome

    def submit_response(outcome) -> dict:
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

    # -- mutations ---------------------------------------------------------

    @app.post(API_PREFIX + "/init")
    def init(request: Request, envelope: Envelope):
        return submit_response(submit_envelope(request, envelope, "init"))

    @app.post(API_PREFIX + "/identities")
    def register_identity(request: Request, envelope: Envelope):
        return submit_response(submit_envelope(request, envelope, "identities"))

    @app.post(API_PREFIX + "/cases", status_code=201)
    def create_case(request: Request, envelope: Envelope):
        outcome = submit_envelope(request, envelope, "cases_create")
        doc = submit_response(outcome)
        doc["caseId"] = outcome.result
        return doc

    @app.patch(API_PREFIX + "/cases/{case_id}")
    def patch_case(case_id: int, request: Request, envelope: Envelope):
        if envelope.body.get("args", {}).get("caseId") != case_id:
            raise BadRequest("path case id and body caseId disagree")
        return submit_response(submit_envelope(request, envelope, "cases_patch"))

    @app.post(API_PREFIX + "/cases/{case_id}/investigators")
    def add_investigator(case_id: int, request: Request, envelope: Envelope):
        if envelope.body.get("args", {}).get("caseId") != case_id:
            raise BadRequest("path case id and body caseId disagree")
        return submit_response(submit_envelope(request, envelope, "investigators"))

    @app.post(API_PREFIX + "/cases/{case_id}/events", status_code=201)
    def create_event(case_id: int, request: Request, envelope: Envelope):
        if envelope.body.get("args", {}).get("caseId") != case_id:
            raise BadRequest("path case id and body caseId disagree")
        outcome = submit_envelope(request, envelope, "events_create")
        doc = submit_response(outcome)
        doc["eventId"] = outcome.result
        return doc

    @app.patch(API_PREFIX + "/events/{event_id}")
    def patch_event(event_id: int, request: Request, envelope: Envelope):
        if envelope.body.get("args", {}).get("eventId") != event_id:
            raise BadRequest("path event id and body eventId disagree")
        return submit_response(submit_envelope(request, envelope, "events_patch"))

    # -- reads --------------------------------------------------------------

    @app.get(API_PREFIX + "/stats")
    def stats():
        return {"cases": node.state.get_number_of_cases(),
                "events": node.state.get_global_number_of_events()}

    @app.get(API_PREFIX + "/cases")
    def list_cases():
        return {"count": node.state.get_number_of_cases(),
                "cases": [c.to_dict() for c in node.state.cases]}

    @app.get(API_PREFIX + "/cases/{case_id}")
    def get_case(case_id: int):
        return node.state.get_case(case_id).to_dict()

    @app.get(API_PREFIX + "/cases/{case_id}/events")
    def list_case_events(case_id: int):
        events = node.state.get_events_case(case_id)
        return {"count": node.state.get_number_of_events_case(case_id),
                "events": [e.to_dict() for e in events]}

    @app.get(API_PREFIX + "/events/{event_id}")
    def get_event(event_id: int):
        return node.state.get_event(event_id).to_dict()

    @app.get(API_PREFIX + "/identities")
    def list_identities():
        return {"identities": [i.to_dict() for i in node.state.registry.identities()]}

    @app.get(API_PREFIX + "/verify")
    def verify():
        return node.verify().to_dict()

    @app.get(API_PREFIX + "/dump", response_class=PlainTextResponse)
    def state_dump():
        return node.canonical_dump()

    @app.get(API_PREFIX + "/meta")
    def meta():
        vocab = node.state.vocabulary
        return {
            "caseStatuses": list(vocab.case_statuses),
            "eventStatuses": list(vocab.event_statuses),
            "eventTypes": list(vocab.event_types),
            "roles": ["prosecutor", "investigator", "auditor"],
            "adminKey": node.state.registry.admin_key.hex(),
        }

    # -- evidence -------------------------------------------------------------

    @app.post(API_PREFIX + "/evidence", status_code=201)
    async def put_evidence(request: Request):
        content = await request.body()
        digest = node.store.put_blob(content)
        return {"digest": digest.hex(), "length": len(content)}

    @app.post(API_PREFIX + "/evidence/{digest}/descriptor")
    async def put_descriptor(digest: str, request: Request, format: str = "json"):
        raw = await request.body()
        descriptor = EvidenceDescriptor.from_bytes(format, raw)
        digest_bytes = codec.from_hex(digest, codec.DIGEST_LEN, "digest")
        node.store.attach_descriptor(digest_bytes, descriptor)
        return {"digest": digest, "format": descriptor.format}

    @app.get(API_PREFIX + "/evidence/{digest}")
    def get_evidence(digest: str):
        digest_bytes = codec.from_hex(digest, codec.DIGEST_LEN, "digest")
        content = node.store.get_blob(digest_bytes)
        return Response(content=content, media_type="application/octet-stream")

    @app.get(API_PREFIX + "/store/audit", response_class=PlainTextResponse)
    def store_audit():
        return node.store.audit_text()

    # -- alert stream ------------------------------------------------------------

    @app.get(API_PREFIX + "/alerts")
    def alerts() -> StreamingResponse:
        subscription = node.alert_hub.subscribe()

        def stream() -> Iterator[bytes]:
            try:
                yield b": connected\n\n"
                while True:
                    item = subscription.get(timeout=1.0)
                    if item is None:
                        yield b": keep-alive\n\n"
                        continue
                    if item is OVERFLOW:
                        yield b"event: overflow\ndata: {}\n\n"
                        return
                    payload = json.dumps(item.to_dict(),
                                         separators=(",", ":")).encode()
                    yield (f"id: {item.seq}\n".encode()
                           + b"event: alert\ndata: " + payload + b"\n\n")
            finally:
                subscription.close()

        return StreamingResponse(stream(), media_type="text/event-stream")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(static_dir), html=True),
                  name="dashboard")

    return app
