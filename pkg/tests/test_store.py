"""Content-addressed store: addressing, purge gating, corruption detection."""

import json

import pytest

from custodia.errors import (
    BlobNotFound,
    DescriptorMalformed,
    IntegrityViolation,
    NotMarkedDeleted,
    Purged,
)
from custodia.store import EvidenceDescriptor, EvidenceStore
from reference_sha256 import reference_sha256

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


@pytest.fixture
def store(tmp_path):
    return EvidenceStore(tmp_path / "store")


@pytest.fixture
def gated_store(tmp_path):
    deleted: set[bytes] = set()
    st = EvidenceStore(tmp_path / "gated", purge_gate=lambda d: d in deleted)
    st.deleted = deleted        # test hook standing in for the ledger query
    return st


def test_empty_blob_digest_matches_independent_oracle(store):
    digest = store.put_blob(b"")
    assert digest.hex() == EMPTY_SHA256
    assert digest == reference_sha256(b"")
    assert len(digest.hex()) == 64


def test_put_is_idempotent(store):
    content = b"CCTV frame dump"
    first = store.put_blob(content)
    count_before = sum(1 for _ in store.iter_digests())
    second = store.put_blob(content)
    assert first == second
    assert sum(1 for _ in store.iter_digests()) == count_before


def test_roundtrip_and_reference_hash(store):
    content = b"journal extract day 1: withdrawal 700"
    digest = store.put_blob(content)
    assert digest == reference_sha256(content)
    assert store.get_blob(digest) == content


def test_get_unknown_blob(store):
    with pytest.raises(BlobNotFound):
        store.get_blob(b"\x42" * 32)


def test_fanout_layout(store, tmp_path):
    digest = store.put_blob(b"layout probe")
    hexd = digest.hex()
    assert (tmp_path / "store" / hexd[:2] / hexd[2:4] / hexd).exists()


def test_corruption_detected_on_read_any_byte(store, tmp_path):
    content = b"tamper me"
    digest = store.put_blob(content)
    blob_path = tmp_path / "store" / digest.hex()[:2] / digest.hex()[2:4] / digest.hex()
    original = blob_path.read_bytes()
    for pos in range(len(original)):
        corrupted = bytearray(original)
        corrupted[pos] ^= 0x80
        blob_path.write_bytes(bytes(corrupted))
        with pytest.raises(IntegrityViolation):
            store.get_blob(digest)
    blob_path.write_bytes(original)
    assert store.get_blob(digest) == content


def test_purge_flow(gated_store):
    digest = gated_store.put_blob(b"to be destroyed")
    with pytest.raises(NotMarkedDeleted):
        gated_store.purge_blob(digest)
    gated_store.deleted.add(digest)
    gated_store.purge_blob(digest)
    with pytest.raises(Purged):
        gated_store.get_blob(digest)
    gated_store.purge_blob(digest)          # idempotent no-op
    with pytest.raises(BlobNotFound):
        gated_store.purge_blob(b"\x01" * 32)


def test_purge_keeps_metadata(gated_store):
    digest = gated_store.put_blob(b"metadata survives")
    gated_store.deleted.add(digest)
    gated_store.purge_blob(digest)
    assert gated_store.has_blob(digest)
    lines = gated_store.audit()
    assert [l.status for l in lines if l.digest == digest] == ["PURGED"]


def test_external_pointer(store):
    digest = bytes.fromhex(EMPTY_SHA256)
    store.register_external(digest)
    assert store.has_blob(digest) and store.is_external(digest)
    with pytest.raises(BlobNotFound):
        store.get_blob(digest)
    assert any(l.digest == digest and l.status == "OK" for l in store.audit())


def test_audit_lines_format(store, tmp_path):
    d1 = store.put_blob(b"alpha")
    d2 = store.put_blob(b"beta-longer")
    text = store.audit_text()
    lines = text.strip().split("\n")
    assert len(lines) == 2
    for line in lines:
        hexd, length, status = line.split(" ")
        assert len(hexd) == 64 and status == "OK"
        assert int(length) in (5, 11)
    # sweep pinpoints exactly the corrupted blob
    path = tmp_path / "store" / d1.hex()[:2] / d1.hex()[2:4] / d1.hex()
    path.write_bytes(b"XXXXX")
    statuses = {l.digest: l.status for l in store.audit()}
    assert statuses[d1] == "CORRUPT" and statuses[d2] == "OK"


def test_descriptor_json_validation():
    good = json.dumps({"format": "json", "subject": EMPTY_SHA256,
                       "entries": {"source": "cctv"}}).encode()
    desc = EvidenceDescriptor.from_json_bytes(good)
    assert desc.subject_digest.hex() == EMPTY_SHA256
    for bad in (b"not json", b"[]",
                json.dumps({"format": "csv", "subject": EMPTY_SHA256,
                            "entries": {}}).encode(),
                json.dumps({"format": "json", "subject": "zz",
                            "entries": {}}).encode(),
                json.dumps({"format": "json", "subject": EMPTY_SHA256}).encode()):
        with pytest.raises(DescriptorMalformed):
            EvidenceDescriptor.from_json_bytes(bad)


def test_descriptor_csv_validation():
    good = b"key,value\nsource,core banking\nday,1\n"
    assert EvidenceDescriptor.from_csv_bytes(good).format == "csv"
    with pytest.raises(DescriptorMalformed):
        EvidenceDescriptor.from_csv_bytes(b"")
    with pytest.raises(DescriptorMalformed):
        EvidenceDescriptor.from_csv_bytes(b"a,b\n1,2,3\n")


def test_descriptor_subject_must_match_content(store):
    content = b"subject check"
    desc = EvidenceDescriptor.from_json_bytes(json.dumps(
        {"format": "json", "subject": EMPTY_SHA256, "entries": {}}).encode())
    with pytest.raises(DescriptorMalformed):
        store.put_blob(content, desc)


def test_descriptor_stored_beside_blob(store):
    content = b"with descriptor"
    import hashlib
    subject = hashlib.sha256(content).hexdigest()
    desc = EvidenceDescriptor.from_json_bytes(json.dumps(
        {"format": "json", "subject": subject, "entries": {"k": "v"}}).encode())
    digest = store.put_blob(content, desc)
    stored = store.get_descriptor(digest)
    assert stored is not None and stored.format == "json"
    assert stored.raw == desc.raw


def test_attach_descriptor_later(store):
    digest = store.put_blob(b"late descriptor")
    store.attach_descriptor(digest, EvidenceDescriptor.from_csv_bytes(
        b"key,value\nsource,it-dept\n"))
    assert store.get_descriptor(digest).format == "csv"
    with pytest.raises(BlobNotFound):
        store.attach_descriptor(b"\x09" * 32, EvidenceDescriptor.from_csv_bytes(
            b"key,value\nx,y\n"))


def test_purge_never_touches_ledger(staffed_node, actors):
    """chainLength and on-ledger digests are unchanged across purgeBlob."""
    from custodia.invoker import LocalInvoker

    inv = LocalInvoker(staffed_node)
    inv.add_case(actors.prosecutor, "c", "d", actors.investigator.public.hex(),
                 "g", "00" * 32, 2_000)
    content = b"evidence to purge"
    digest_hex = inv.put_evidence(content)["digest"]
    inv.add_event(actors.investigator, 0, "analysis", "x", "active", digest_hex, 3_000)
    inv.update_event_status(actors.investigator, 0, "deleted", 3_100)

    length_before = staffed_node.ledger.chain_length()
    digest = bytes.fromhex(digest_hex)
    staffed_node.store.purge_blob(digest)

    assert staffed_node.ledger.chain_length() == length_before
    assert staffed_node.state.get_event_hash(0) == digest    # f18 still serves it
    with pytest.raises(Purged):
        staffed_node.store.get_blob(digest)


def test_full_volume_maps_to_storage_full(store, monkeypatch):
    import errno

    def explode(path, data):
        raise OSError(errno.ENOSPC, "No space left on device")

    from pathlib import Path
    monkeypatch.setattr(Path, "write_bytes", explode)
    from custodia.errors import StorageFull
    with pytest.raises(StorageFull):
        store.put_blob(b"does not fit")


def test_purge_gate_requires_deleted_event(staffed_node, actors):
    from custodia.invoker import LocalInvoker

    inv = LocalInvoker(staffed_node)
    inv.add_case(actors.prosecutor, "c", "d", actors.investigator.public.hex(),
                 "g", "00" * 32, 2_000)
    digest_hex = inv.put_evidence(b"still active")["digest"]
    inv.add_event(actors.investigator, 0, "analysis", "x", "active", digest_hex, 3_000)
    with pytest.raises(NotMarkedDeleted):
        staffed_node.store.purge_blob(bytes.fromhex(digest_hex))
