"""Request-envelope wire format shared by the service and its clients.

A mutating request carries two signatures: the transaction signature
(over the canonical transaction preimage, stored on-ledger) and the
envelope signature over

    len(method) || method || len(path) || path || sha256(canonical body JSON) || nonce(8)

which binds the request to its route and makes replays detectable via
the strictly-increasing per-caller nonce.
"""

from __future__ import annotations

import json

from . import codec


def canonical_json(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True).encode("utf-8")


def request_preimage(method: str, path: str, body_bytes: bytes, nonce: int) -> bytes:
    return (codec.lp_text(method.upper())
            + codec.lp_text(path)
            + codec.sha256(body_bytes)
            + codec.u64(nonce))


def envelope_for(signer, method: str, path: str, body: dict, nonce: int) -> dict:
    """Client-side: wrap a signed body document into a transport envelope."""
    body_bytes = canonical_json(body)
    signature = signer.sign(request_preimage(method, path, body_bytes, nonce))
    return {
        "body": body,
        "callerKey": signer.public.hex(),
        "nonce": nonce,
        "signature": signature.hex(),
    }
