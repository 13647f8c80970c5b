"""Canonical byte encoding for everything that gets hashed or signed.

The layout is normative and bit-exact: integers are big-endian fixed
width, variable byte strings carry a 4-byte big-endian length prefix.
Transaction preimage:

    functionCode (1) || argCount (2) || per arg: name || value || authorKey (32) || timestampMs (8)

where ``name`` and ``value`` are length-prefixed byte strings. Block
canonical bytes:

    height (8) || prevHash (32) || timestampMs (8) || txCount (4) || txIds (32 each)

Any change here invalidates every stored digest, so there is no
versioning escape hatch by design.
"""

from __future__ import annotations

import hashlib

DIGEST_LEN = 32
KEY_LEN = 32
SIGNATURE_LEN = 64
ZERO_DIGEST = b"\x00" * DIGEST_LEN

LOG_MAGIC = b"CUST1"


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def u8(value: int) -> bytes:
    return value.to_bytes(1, "big")


def u16(value: int) -> bytes:
    return value.to_bytes(2, "big")


def u32(value: int) -> bytes:
    return value.to_bytes(4, "big")


def u64(value: int) -> bytes:
    return value.to_bytes(8, "big")


def lp_bytes(data: bytes) -> bytes:
    """Length-prefixed byte string (4-byte big-endian length)."""
    return u32(len(data)) + data


def lp_text(text: str) -> bytes:
    return lp_bytes(text.encode("utf-8"))


def require_digest(value: bytes, what: str = "digest") -> bytes:
    if not isinstance(value, bytes) or len(value) != DIGEST_LEN:
        raise ValueError(f"{what} must be exactly {DIGEST_LEN} bytes")
    return value


def require_key(value: bytes, what: str = "key") -> bytes:
    if not isinstance(value, bytes) or len(value) != KEY_LEN:
        raise ValueError(f"{what} must be exactly {KEY_LEN} bytes")
    return value


def to_hex(value: bytes) -> str:
    return value.hex()


def from_hex(text: str, expected_len: int | None = None, what: str = "value") -> bytes:
    try:
        raw = bytes.fromhex(text)
    except (ValueError, TypeError):
        raise ValueError(f"{what} is not valid hex") from None
    if expected_len is not None and len(raw) != expected_len:
        raise ValueError(f"{what} must be {expected_len} bytes, got {len(raw)}")
    return raw


class ByteReader:
    """Sequential reader with strict bounds; used by the log parser."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise ValueError("truncated record")
        chunk = self._data[self._pos:self._pos + n]
        self._pos += n
        return chunk

    def read_u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def read_u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def read_u64(self) -> int:
        return int.from_bytes(self.take(8), "big")

    def read_lp_bytes(self) -> bytes:
        return self.take(self.read_u32())

    def expect_end(self) -> None:
        if self.remaining != 0:
            raise ValueError("trailing bytes in record")
