"""Content-addressed evidence store; the ledger keeps only pointers and hashes.

Layout: two-level hex fan-out under the store root, one file per blob,
metadata and optional descriptor beside it:

    aa/bb/<64-hex>              blob bytes
    aa/bb/<64-hex>.meta.json    {"length":..,"storedAtMs":..,"purged":..,"external":..}
    aa/bb/<64-hex>.desc.json    or .desc.csv

Writes go through write-then-rename for atomic visibility; every read
re-hashes the bytes so silent on-disk corruption surfaces as
IntegrityViolation rather than bad evidence.
"""

from __future__ import annotations

import csv
import errno
import io
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import codec
from .errors import (
    BlobNotFound,
    DescriptorMalformed,
    IntegrityViolation,
    NotMarkedDeleted,
    Purged,
    StorageFull,
)

logger = logging.getLogger(__name__)

OK = "OK"
PURGED = "PURGED"
CORRUPT = "CORRUPT"


@dataclass(frozen=True)
class EvidenceDescriptor:
    """Search-friendly description file attached to a blob (JSON or CSV)."""

    format: str                       # "json" | "csv"
    raw: bytes                        # exact descriptor bytes as stored
    subject_digest: bytes | None      # JSON descriptors name their subject

    @classmethod
    def from_json_bytes(cls, raw: bytes) -> "EvidenceDescriptor":
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            raise DescriptorMalformed(f"descriptor is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("format") != "json":
            raise DescriptorMalformed('JSON descriptor must carry "format": "json"')
        if not isinstance(doc.get("entries"), dict):
            raise DescriptorMalformed('JSON descriptor must carry an "entries" object')
        try:
            subject = codec.from_hex(doc.get("subject", ""), codec.DIGEST_LEN, "subject")
        except ValueError as exc:
            raise DescriptorMalformed(str(exc)) from None
        return cls(format="json", raw=raw, subject_digest=subject)

    @classmethod
    def from_csv_bytes(cls, raw: bytes) -> "EvidenceDescriptor":
        try:
            rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DescriptorMalformed(f"descriptor is not valid CSV: {exc}") from None
        rows = [r for r in rows if r]
        if not rows:
            raise DescriptorMalformed("CSV descriptor needs a header row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DescriptorMalformed("CSV descriptor rows must match the header width")
        return cls(format="csv", raw=raw, subject_digest=None)

    @classmethod
    def from_bytes(cls, fmt: str, raw: bytes) -> "EvidenceDescriptor":
        if fmt == "json":
            return cls.from_json_bytes(raw)
        if fmt == "csv":
            return cls.from_csv_bytes(raw)
        raise DescriptorMalformed(f"unknown descriptor format {fmt!r}")


@dataclass(frozen=True)
class AuditLine:
    digest: bytes
    length: int
    status: str         # OK | PURGED | CORRUPT

    def render(self) -> str:
        return f"{self.digest.hex()} {self.length} {self.status}"


class EvidenceStore:
    """Blob store keyed by SHA-256 of content.

    ``purge_gate`` decides whether a digest is destruction-authorized
    (wired to "some ledger event with this digest is status deleted");
    without a gate every purge is refused.
    """

    def __init__(self, root: str | Path,
                 purge_gate: Callable[[bytes], bool] | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.purge_gate = purge_gate

    # -- paths ------------------------------------------------------------

    def _blob_path(self, digest: bytes) -> Path:
        hexd = digest.hex()
        return self.root / hexd[:2] / hexd[2:4] / hexd

    def _meta_path(self, digest: bytes) -> Path:
        return self._blob_path(digest).with_name(digest.hex() + ".meta.json")

    def _desc_path(self, digest: bytes, fmt: str) -> Path:
        return self._blob_path(digest).with_name(f"{digest.hex()}.desc.{fmt}")

    def _read_meta(self, digest: bytes) -> dict | None:
        path = self._meta_path(digest)
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def _write_meta(self, digest: bytes, meta: dict) -> None:
        self._atomic_write(self._meta_path(digest),
                           json.dumps(meta, sort_keys=True).encode())

    @staticmethod
    def _atomic_write(path: Path, data: bytes) -> None:
        tmp = path.with_name(path.name + ".tmp")
        try:
            tmp.write_bytes(data)
            os.replace(tmp, path)
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull("store volume is full") from exc
            raise

    # -- operations ---------------------------------------------------------

    def put_blob(self, content: bytes,
                 descriptor: EvidenceDescriptor | None = None) -> bytes:
        """Store ``content`` under its SHA-256; idempotent on identical bytes."""
        if descriptor is not None:
            digest_preview = codec.sha256(content)
            if (descriptor.subject_digest is not None
                    and descriptor.subject_digest != digest_preview):
                raise DescriptorMalformed(
                    "descriptor subject does not match the content digest")
        if not content:
            logger.warning("storing empty evidence blob (allowed but unusual)")
        digest = codec.sha256(content)
        blob_path = self._blob_path(digest)
        blob_path.parent.mkdir(parents=True, exist_ok=True)
        meta = self._read_meta(digest)
        if meta is not None and not meta.get("purged") and blob_path.exists():
            return digest          # content addressing: nothing to duplicate
        self._atomic_write(blob_path, content)
        self._write_meta(digest, {
            "length": len(content),
            "storedAtMs": int(time.time() * 1000),
            "purged": False,
            "external": False,
        })
        if descriptor is not None:
            self._atomic_write(self._desc_path(digest, descriptor.format),
                               descriptor.raw)
        return digest

    def register_external(self, digest: bytes) -> None:
        """Record an external content pointer (IPFS-style); no local bytes."""
        codec.require_digest(digest)
        self._blob_path(digest).parent.mkdir(parents=True, exist_ok=True)
        if self._read_meta(digest) is None:
            self._write_meta(digest, {
                "length": 0,
                "storedAtMs": int(time.time() * 1000),
                "purged": False,
                "external": True,
            })

    def get_blob(self, digest: bytes) -> bytes:
        """Return stored bytes; every read re-verifies the digest."""
        meta = self._read_meta(digest)
        if meta is None:
            raise BlobNotFound(f"no blob {digest.hex()}")
        if meta.get("purged"):
            raise Purged(f"blob {digest.hex()} was purged after evidence destruction")
        if meta.get("external"):
            raise BlobNotFound(
                f"blob {digest.hex()} is an external pointer; content not stored locally")
        path = self._blob_path(digest)
        if not path.exists():
            raise IntegrityViolation(f"blob file for {digest.hex()} is missing")
        content = path.read_bytes()
        if codec.sha256(content) != digest:
            raise IntegrityViolation(
                f"stored bytes no longer hash to {digest.hex()}")
        return content

    def attach_descriptor(self, digest: bytes, descriptor: EvidenceDescriptor) -> None:
        """Add or replace the descriptor of an already-stored blob."""
        if self._read_meta(digest) is None:
            raise BlobNotFound(f"no blob {digest.hex()}")
        if (descriptor.subject_digest is not None
                and descriptor.subject_digest != digest):
            raise DescriptorMalformed(
                "descriptor subject does not match the blob digest")
        self._atomic_write(self._desc_path(digest, descriptor.format), descriptor.raw)

    def get_descriptor(self, digest: bytes) -> EvidenceDescriptor | None:
        for fmt in ("json", "csv"):
            path = self._desc_path(digest, fmt)
            if path.exists():
                return EvidenceDescriptor.from_bytes(fmt, path.read_bytes())
        return None

    def has_blob(self, digest: bytes) -> bool:
        return self._read_meta(digest) is not None

    def is_external(self, digest: bytes) -> bool:
        meta = self._read_meta(digest)
        return bool(meta and meta.get("external"))

    def purge_blob(self, digest: bytes) -> None:
        """Remove content bytes; digest and metadata stay. Idempotent.

        Requires a destruction authorization (an on-ledger deleted event
        referencing this digest) via the purge gate.
        """
        meta = self._read_meta(digest)
        if meta is None:
            raise BlobNotFound(f"no blob {digest.hex()}")
        if meta.get("purged"):
            return
        if self.purge_gate is None or not self.purge_gate(digest):
            raise NotMarkedDeleted(
                f"no deleted-status ledger event references {digest.hex()}")
        path = self._blob_path(digest)
        if path.exists():
            path.unlink()
        meta["purged"] = True
        meta["length"] = 0
        self._write_meta(digest, meta)

    # -- audit ------------------------------------------------------------

    def iter_digests(self):
        for meta_path in sorted(self.root.glob("*/*/*.meta.json")):
            yield bytes.fromhex(meta_path.name.split(".")[0])

    def audit(self) -> list[AuditLine]:
        """Full-store sweep: re-hash every non-purged local blob."""
        lines = []
        for digest in self.iter_digests():
            meta = self._read_meta(digest) or {}
            if meta.get("purged"):
                lines.append(AuditLine(digest, 0, PURGED))
                continue
            if meta.get("external"):
                lines.append(AuditLine(digest, meta.get("length", 0), OK))
                continue
            path = self._blob_path(digest)
            if not path.exists():
                lines.append(AuditLine(digest, 0, CORRUPT))
                continue
            content = path.read_bytes()
            if codec.sha256(content) != digest:
                lines.append(AuditLine(digest, len(content), CORRUPT))
            else:
                lines.append(AuditLine(digest, len(content), OK))
        return lines

    def audit_text(self) -> str:
        return "\n".join(line.render() for line in self.audit()) + "\n"
