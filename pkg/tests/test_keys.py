"""Keypair handling, keyfile format, request-envelope preimage layout."""

import pytest

from custodia import codec, wire
from custodia.errors import SignatureInvalid
from custodia.keys import KeyPair, signature_valid, verify_signature
from reference_sha256 import reference_sha256


def test_sign_verify_roundtrip():
    pair = KeyPair.generate()
    message = b"forensic action"
    signature = pair.sign(message)
    assert len(signature) == 64 and len(pair.public) == 32
    verify_signature(pair.public, message, signature)


def test_any_flipped_signature_byte_fails():
    pair = KeyPair.generate()
    message = b"attribution matters"
    signature = pair.sign(message)
    for pos in range(0, 64, 7):
        forged = bytearray(signature)
        forged[pos] ^= 0x01
        assert not signature_valid(pair.public, message, bytes(forged))
    assert not signature_valid(pair.public, message + b".", signature)
    other = KeyPair.generate()
    assert not signature_valid(other.public, message, signature)


def test_verify_raises_typed_error():
    pair = KeyPair.generate()
    with pytest.raises(SignatureInvalid):
        verify_signature(pair.public, b"m", b"\x00" * 64)
    with pytest.raises(SignatureInvalid):
        verify_signature(pair.public, b"m", b"\x00" * 63)


def test_keyfile_roundtrip(tmp_path):
    pair = KeyPair.generate()
    path = tmp_path / "actor.key"
    pair.save(path)
    lines = path.read_text().splitlines()
    assert lines == [pair.secret.hex(), pair.public.hex()]
    loaded = KeyPair.load(path)
    assert loaded == pair


def test_keyfile_mismatch_rejected(tmp_path):
    a, b = KeyPair.generate(), KeyPair.generate()
    path = tmp_path / "bad.key"
    path.write_text(f"{a.secret.hex()}\n{b.public.hex()}\n")
    with pytest.raises(ValueError):
        KeyPair.load(path)


def test_deterministic_from_seed():
    seed = bytes(range(32))
    assert KeyPair.generate(seed) == KeyPair.generate(seed)


def test_request_preimage_layout():
    body_bytes = wire.canonical_json({"b": 1, "a": 2})
    assert body_bytes == b'{"a":2,"b":1}'
    preimage = wire.request_preimage("post", "/v1/cases", body_bytes, 7)
    hand_built = (
        b"\x00\x00\x00\x04POST"
        + b"\x00\x00\x00\x09/v1/cases"
        + reference_sha256(body_bytes)
        + (7).to_bytes(8, "big")
    )
    assert preimage == hand_built


def test_envelope_signature_verifies():
    pair = KeyPair.generate()
    envelope = wire.envelope_for(pair, "POST", "/v1/cases", {"x": 1}, 42)
    preimage = wire.request_preimage(
        "POST", "/v1/cases", wire.canonical_json(envelope["body"]), 42)
    verify_signature(codec.from_hex(envelope["callerKey"], 32),
                     preimage, codec.from_hex(envelope["signature"], 64))
