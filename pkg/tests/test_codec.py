"""Canonical encoding: the layout every digest and signature depends on."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from custodia import codec
from custodia.codec import ByteReader


def test_fixed_width_integers():
    assert codec.u8(0x01) == b"\x01"
    assert codec.u16(0x0203) == b"\x02\x03"
    assert codec.u32(1) == b"\x00\x00\x00\x01"
    assert codec.u64(1) == b"\x00\x00\x00\x00\x00\x00\x00\x01"
    assert codec.u64(2**64 - 1) == b"\xff" * 8


def test_length_prefixed_bytes():
    assert codec.lp_bytes(b"") == b"\x00\x00\x00\x00"
    assert codec.lp_bytes(b"ab") == b"\x00\x00\x00\x02ab"
    assert codec.lp_text("é") == b"\x00\x00\x00\x02\xc3\xa9"


def test_digest_validation():
    codec.require_digest(b"\x00" * 32)
    with pytest.raises(ValueError):
        codec.require_digest(b"\x00" * 31)
    with pytest.raises(ValueError):
        codec.require_digest("00" * 32)  # str, not bytes


def test_hex_roundtrip_and_length_check():
    assert codec.from_hex("00ff", None) == b"\x00\xff"
    with pytest.raises(ValueError):
        codec.from_hex("zz", None)
    with pytest.raises(ValueError):
        codec.from_hex("00" * 31, 32)


def test_reader_bounds():
    reader = ByteReader(b"\x00\x00\x00\x02ab")
    assert reader.read_lp_bytes() == b"ab"
    reader.expect_end()
    with pytest.raises(ValueError):
        ByteReader(b"\x00\x00\x00\x05ab").read_lp_bytes()
    with pytest.raises(ValueError):
        ByteReader(b"ab").expect_end()


@given(st.binary(max_size=200))
def test_lp_bytes_roundtrip(data):
    reader = ByteReader(codec.lp_bytes(data))
    assert reader.read_lp_bytes() == data
    reader.expect_end()


@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_u64_roundtrip(value):
    assert ByteReader(codec.u64(value)).read_u64() == value
