"""Append-only, hash-chained, signature-verified transaction log.

One block per transaction (instant sealing). Every record is persisted
in canonical bytes, so any reader can recompute every digest; `verify`
re-reads the file and reports the earliest violated height instead of
raising. The log survives process restart: the in-memory index is
rebuilt by parsing the file on open.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from . import codec, functions, keys
from .codec import ByteReader
from .errors import (
    CorruptChain,
    NotFound,
    SignatureInvalid,
    TimestampRegression,
    UnknownFunction,
)

CHAIN_BREAK = "chain-break"
TX_HASH_MISMATCH = "tx-hash-mismatch"
SIGNATURE_INVALID = "signature-invalid"
TIMESTAMP_REGRESSION = "timestamp-regression"


@dataclass(frozen=True)
class Transaction:
    """A signed, canonically-encoded invocation of one ledger function."""

    function: str          # wire name, e.g. "f2"
    args: dict
    author_key: bytes
    timestamp_ms: int
    signature: bytes

    def preimage(self) -> bytes:
        spec = functions.get(self.function)
        parts = [codec.u8(spec.code), codec.u16(len(spec.args))]
        for name, kind in spec.args:
            parts.append(codec.lp_text(name))
            parts.append(codec.lp_bytes(functions.encode_arg(kind, self.args[name])))
        parts.append(codec.require_key(self.author_key, "authorKey"))
        parts.append(codec.u64(self.timestamp_ms))
        return b"".join(parts)

    @property
    def tx_id(self) -> bytes:
        return codec.sha256(self.preimage())

    def record_bytes(self) -> bytes:
        """Embedded form inside a block record: length-prefixed preimage + raw signature."""
        return codec.lp_bytes(self.preimage()) + self.signature


def build_transaction(signer: keys.KeyPair, function: str, args: dict,
                      timestamp_ms: int) -> Transaction:
    """Canonicalize args, sign the preimage, return the sealed transaction."""
    spec = functions.get(function)
    clean = functions.check_args(spec, args)
    unsigned = Transaction(function=spec.name, args=clean,
                           author_key=signer.public,
                           timestamp_ms=timestamp_ms, signature=b"\x00" * 64)
    signature = signer.sign(unsigned.preimage())
    return Transaction(function=spec.name, args=clean, author_key=signer.public,
                       timestamp_ms=timestamp_ms, signature=signature)


def parse_transaction(raw_preimage: bytes, signature: bytes) -> Transaction:
    """Inverse of Transaction.preimage(); raises ValueError on malformed bytes."""
    reader = ByteReader(raw_preimage)
    code = reader.take(1)[0]
    spec = functions.BY_CODE.get(code)
    if spec is None:
        raise ValueError(f"unknown function code 0x{code:02x}")
    count = reader.read_u16()
    if count != len(spec.args):
        raise ValueError(f"{spec.name} expects {len(spec.args)} args, record has {count}")
    args = {}
    for name, kind in spec.args:
        stored_name = reader.read_lp_bytes().decode("utf-8")
        if stored_name != name:
            raise ValueError(f"{spec.name} argument order violated: {stored_name!r}")
        args[name] = functions.decode_arg(kind, reader.read_lp_bytes())
    author_key = reader.take(codec.KEY_LEN)
    timestamp_ms = reader.read_u64()
    reader.expect_end()
    return Transaction(function=spec.name, args=args, author_key=author_key,
                       timestamp_ms=timestamp_ms, signature=signature)


@dataclass(frozen=True)
class Block:
    height: int
    prev_hash: bytes
    timestamp_ms: int
    tx_ids: tuple[bytes, ...]

    def canonical_bytes(self) -> bytes:
        return (codec.u64(self.height)
                + self.prev_hash
                + codec.u64(self.timestamp_ms)
                + codec.u32(len(self.tx_ids))
                + b"".join(self.tx_ids))

    @property
    def block_hash(self) -> bytes:
        return codec.sha256(self.canonical_bytes())


@dataclass(frozen=True)
class BlockReceipt:
    height: int
    block_hash: bytes
    tx_id: bytes


@dataclass(frozen=True)
class VerificationReport:
    ok: bool
    first_bad_height: int | None = None
    failure_kind: str | None = None
    block_count: int = 0

    def to_dict(self) -> dict:
        out = {"ok": self.ok, "blocks": self.block_count}
        if not self.ok:
            out["firstBadHeight"] = self.first_bad_height
            out["failureKind"] = self.failure_kind
        return out


def _encode_record(block: Block, txs: Iterable[Transaction]) -> bytes:
    payload = block.canonical_bytes() + b"".join(tx.record_bytes() for tx in txs)
    return codec.u32(len(payload)) + payload


def _parse_record_raw(payload: bytes) -> tuple[Block, list[tuple[bytes, bytes]]]:
    """Frame a record without interpreting transaction preimages, so hash
    and signature checks can run on the raw bytes first."""
    reader = ByteReader(payload)
    height = reader.read_u64()
    prev_hash = reader.take(codec.DIGEST_LEN)
    timestamp_ms = reader.read_u64()
    tx_count = reader.read_u32()
    tx_ids = tuple(reader.take(codec.DIGEST_LEN) for _ in range(tx_count))
    raw_txs = []
    for _ in range(tx_count):
        preimage = reader.read_lp_bytes()
        signature = reader.take(codec.SIGNATURE_LEN)
        raw_txs.append((preimage, signature))
    reader.expect_end()
    return Block(height, prev_hash, timestamp_ms, tx_ids), raw_txs


def _parse_record(payload: bytes) -> tuple[Block, list[Transaction]]:
    block, raw_txs = _parse_record_raw(payload)
    return block, [parse_transaction(pre, sig) for pre, sig in raw_txs]


def _scan_records(data: bytes):
    """Yield record payloads in file order; ValueError on bad framing."""
    if data[:len(codec.LOG_MAGIC)] != codec.LOG_MAGIC:
        raise ValueError("bad log magic")
    pos = len(codec.LOG_MAGIC)
    while pos < len(data):
        if pos + 4 > len(data):
            raise ValueError("truncated record length")
        length = int.from_bytes(data[pos:pos + 4], "big")
        start, end = pos + 4, pos + 4 + length
        if end > len(data):
            raise ValueError("record extends past end of file")
        yield data[start:end]
        pos = end


def verify_log(path: str | Path) -> VerificationReport:
    """Re-hash and re-verify the persisted chain; corruption is a report, not an error.

    Checks, per block: record structure, height sequence, prevHash linkage,
    txId recomputation, signatures, block timestamp equal to its last
    transaction's, and timestamp monotonicity across the log. Failures
    name the earliest violated height.
    """
    path = Path(path)
    if not path.exists():
        return VerificationReport(ok=True, block_count=0)
    data = path.read_bytes()
    if not data:
        return VerificationReport(ok=True, block_count=0)

    def bad(height: int, kind: str) -> VerificationReport:
        return VerificationReport(False, height, kind, block_count=height)

    prev_hash = codec.ZERO_DIGEST
    last_ts = 0
    height = 0
    scanner = _scan_records(data)
    while True:
        try:
            payload = next(scanner)
        except StopIteration:
            break
        except ValueError:
            # framing damage is attributed to the record it truncates
            return bad(height, CHAIN_BREAK)
        try:
            block, raw_txs = _parse_record_raw(payload)
        except ValueError:
            return bad(height, CHAIN_BREAK)
        if block.height != height or not raw_txs or len(block.tx_ids) != len(raw_txs):
            return bad(height, CHAIN_BREAK)
        if block.prev_hash != prev_hash:
            return bad(height, CHAIN_BREAK)
        # hash and signature run on the raw preimage bytes, before any
        # structural interpretation, so a flipped payload byte always
        # surfaces as tx-hash-mismatch
        for (preimage, _), stored_id in zip(raw_txs, block.tx_ids):
            if codec.sha256(preimage) != stored_id:
                return bad(height, TX_HASH_MISMATCH)
        try:
            txs = [parse_transaction(pre, sig) for pre, sig in raw_txs]
        except (ValueError, UnicodeDecodeError):
            return bad(height, CHAIN_BREAK)
        for tx in txs:
            if not keys.signature_valid(tx.author_key, tx.preimage(), tx.signature):
                return bad(height, SIGNATURE_INVALID)
        if block.timestamp_ms != txs[-1].timestamp_ms:
            return bad(height, CHAIN_BREAK)
        for tx in txs:
            if tx.timestamp_ms < last_ts:
                return bad(height, TIMESTAMP_REGRESSION)
            last_ts = tx.timestamp_ms
        prev_hash = block.block_hash
        height += 1
    return VerificationReport(ok=True, block_count=height)


class Ledger:
    """Single-writer hash chain persisted as one append-only file.

    Appends are serialized by an internal lock; reads observe only
    fully-sealed blocks and may run concurrently.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._blocks: list[Block] = []
        self._txs_by_block: list[list[Transaction]] = []
        self._tx_index: dict[bytes, Transaction] = {}
        self._last_ts = 0
        self._load()
        self._fh = open(self.path, "ab")

    def _load(self) -> None:
        if not self.path.exists() or self.path.stat().st_size == 0:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "ab") as fh:
                if fh.tell() == 0:
                    fh.write(codec.LOG_MAGIC)
            return
        report = verify_log(self.path)
        if not report.ok:
            raise CorruptChain(
                f"cannot load ledger {self.path}: verification fails at height "
                f"{report.first_bad_height} ({report.failure_kind})")
        data = self.path.read_bytes()
        for payload in _scan_records(data):
            block, txs = _parse_record(payload)
            self._blocks.append(block)
            self._txs_by_block.append(txs)
            for tx in txs:
                self._tx_index[tx.tx_id] = tx
            self._last_ts = txs[-1].timestamp_ms

    def close(self) -> None:
        self._fh.close()

    # -- writes ---------------------------------------------------------

    def append(self, tx: Transaction) -> BlockReceipt:
        """Seal exactly one new block containing ``tx``.

        Raises SignatureInvalid, TimestampRegression or UnknownFunction;
        on error the chain is unchanged.
        """
        functions.get(tx.function)  # UnknownFunction on unrecognized code
        preimage = tx.preimage()
        keys.verify_signature(tx.author_key, preimage, tx.signature)
        with self._lock:
            if tx.timestamp_ms < self._last_ts:
                raise TimestampRegression(
                    f"transaction timestamp {tx.timestamp_ms} precedes log head {self._last_ts}")
            block = Block(
                height=len(self._blocks),
                prev_hash=self._blocks[-1].block_hash if self._blocks else codec.ZERO_DIGEST,
                timestamp_ms=tx.timestamp_ms,
                tx_ids=(tx.tx_id,),
            )
            try:
                self._fh.write(_encode_record(block, [tx]))
                self._fh.flush()
            except OSError as exc:
                raise CorruptChain(f"ledger write failed: {exc}") from exc
            self._blocks.append(block)
            self._txs_by_block.append([tx])
            self._tx_index[tx.tx_id] = tx
            self._last_ts = tx.timestamp_ms
            return BlockReceipt(block.height, block.block_hash, tx.tx_id)

    # -- reads ----------------------------------------------------------

    def chain_length(self) -> int:
        return len(self._blocks)

    @property
    def last_timestamp_ms(self) -> int:
        return self._last_ts

    def get_block(self, height: int) -> Block:
        if height < 0 or height >= len(self._blocks):
            raise NotFound(f"no block at height {height}")
        return self._blocks[height]

    def get_block_transactions(self, height: int) -> list[Transaction]:
        self.get_block(height)
        return list(self._txs_by_block[height])

    def get_transaction_by_id(self, tx_id: bytes) -> Transaction:
        tx = self._tx_index.get(tx_id)
        if tx is None:
            raise NotFound(f"no transaction {tx_id.hex()}")
        return tx

    def verify(self) -> VerificationReport:
        # lock gives a quiescent file; concurrent reads stay lock-free
        with self._lock:
            return verify_log(self.path)

    def replay(self, handler: Callable[[Transaction], None]) -> int:
        """Invoke ``handler`` once per transaction in log order.

        Verifies the persisted chain first; raises CorruptChain if it fails.
        Returns the number of transactions replayed.
        """
        report = self.verify()
        if not report.ok:
            raise CorruptChain(
                f"chain fails verification at height {report.first_bad_height} "
                f"({report.failure_kind})")
        count = 0
        for txs in self._txs_by_block:
            for tx in txs:
                handler(tx)
                count += 1
        return count
