"""Ed25519 key handling and the 2-line keyfile format.

Keyfiles hold "<hex secret>\n<hex public>\n"; acceptable because identity
management proper is out of scope and keys here are demo credentials.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric import ed25519

from . import codec
from .errors import SignatureInvalid


@dataclass(frozen=True)
class KeyPair:
    secret: bytes   # 32-byte seed
    public: bytes   # 32-byte verification key

    @classmethod
    def generate(cls, seed: bytes | None = None) -> "KeyPair":
        seed = seed if seed is not None else os.urandom(32)
        priv = ed25519.Ed25519PrivateKey.from_private_bytes(seed)
        pub = priv.public_key().public_bytes(
            serialization.Encoding.Raw, serialization.PublicFormat.Raw)
        return cls(secret=seed, public=pub)

    def sign(self, message: bytes) -> bytes:
        priv = ed25519.Ed25519PrivateKey.from_private_bytes(self.secret)
        return priv.sign(message)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(f"{self.secret.hex()}\n{self.public.hex()}\n")

    @classmethod
    def load(cls, path: str | Path) -> "KeyPair":
        lines = Path(path).read_text().splitlines()
        if len(lines) < 2:
            raise ValueError(f"keyfile {path} must hold secret and public hex lines")
        secret = codec.from_hex(lines[0].strip(), 32, "secret key")
        public = codec.from_hex(lines[1].strip(), 32, "public key")
        pair = cls.generate(seed=secret)
        if pair.public != public:
            raise ValueError(f"keyfile {path}: public key does not match secret")
        return pair


def verify_signature(public_key: bytes, message: bytes, signature: bytes) -> None:
    """Raises SignatureInvalid unless ``signature`` verifies; no return value."""
    if len(signature) != codec.SIGNATURE_LEN:
        raise SignatureInvalid("signature must be 64 bytes")
    try:
        ed25519.Ed25519PublicKey.from_public_bytes(public_key).verify(
            signature, message)
    except (InvalidSignature, ValueError):
        raise SignatureInvalid("signature does not verify under author key") from None


def signature_valid(public_key: bytes, message: bytes, signature: bytes) -> bool:
    try:
        verify_signature(public_key, message, signature)
    except SignatureInvalid:
        return False
    return True
