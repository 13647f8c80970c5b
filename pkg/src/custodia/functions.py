"""Registry of the ledger's invocable functions.

Nineteen contract functions plus the custody-transfer extension (0x20)
and identity registration (0x21). Mutators become signed transactions;
accessors are served directly from state and never reach the ledger.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import codec
from .errors import BadRequest, UnknownFunction


class ArgKind(Enum):
    U64 = "u64"
    TEXT = "text"
    DIGEST = "digest"
    KEY = "key"


@dataclass(frozen=True)
class FunctionSpec:
    name: str            # wire name, e.g. "f2" or "fX-custody"
    code: int            # single canonical byte
    public: bool         # permissions column: True = P, False = R
    mutating: bool       # appended to the ledger when True
    args: tuple[tuple[str, ArgKind], ...]  # declared order is normative


_SPECS = [
    FunctionSpec("f1", 0x01, False, True, ()),
    FunctionSpec("f2", 0x02, False, True, (
        ("name", ArgKind.TEXT),
        ("description", ArgKind.TEXT),
        ("responsible", ArgKind.KEY),
        ("globalId", ArgKind.TEXT),
        ("timestampMs", ArgKind.U64),
        ("hash", ArgKind.DIGEST),
    )),
    FunctionSpec("f3", 0x03, False, True, (
        ("caseId", ArgKind.U64),
        ("description", ArgKind.TEXT),
    )),
    FunctionSpec("f4", 0x04, False, True, (
        ("caseId", ArgKind.U64),
        ("status", ArgKind.TEXT),
    )),
    FunctionSpec("f5", 0x05, False, True, (
        ("caseId", ArgKind.U64),
        ("responsible", ArgKind.KEY),
    )),
    FunctionSpec("f6", 0x06, False, True, (
        ("caseId", ArgKind.U64),
        ("investigator", ArgKind.KEY),
    )),
    FunctionSpec("f7", 0x07, True, False, ()),
    FunctionSpec("f8", 0x08, True, False, (("caseId", ArgKind.U64),)),
    FunctionSpec("f9", 0x09, True, False, (("caseId", ArgKind.U64),)),
    FunctionSpec("f10", 0x0A, True, False, (("caseId", ArgKind.U64),)),
    FunctionSpec("f11", 0x0B, True, False, (("caseId", ArgKind.U64),)),
    FunctionSpec("f12", 0x0C, False, True, (
        ("caseId", ArgKind.U64),
        ("type", ArgKind.TEXT),
        ("description", ArgKind.TEXT),
        ("status", ArgKind.TEXT),
        ("hash", ArgKind.DIGEST),
        ("timestampMs", ArgKind.U64),
    )),
    FunctionSpec("f13", 0x0D, False, True, (
        ("eventId", ArgKind.U64),
        ("status", ArgKind.TEXT),
    )),
    FunctionSpec("f14", 0x0E, True, False, (("caseId", ArgKind.U64),)),
    FunctionSpec("f15", 0x0F, True, False, (("caseId", ArgKind.U64),)),
    FunctionSpec("f16", 0x10, True, False, ()),
    FunctionSpec("f17", 0x11, True, False, (("eventId", ArgKind.U64),)),
    FunctionSpec("f18", 0x12, True, False, (("eventId", ArgKind.U64),)),
    FunctionSpec("f19", 0x13, True, False, ()),
    FunctionSpec("fX-custody", 0x20, False, True, (
        ("eventId", ArgKind.U64),
        ("newOwner", ArgKind.KEY),
        ("timestampMs", ArgKind.U64),
    )),
    FunctionSpec("fX-register", 0x21, False, True, (
        ("key", ArgKind.KEY),
        ("role", ArgKind.TEXT),
        ("displayName", ArgKind.TEXT),
    )),
]

BY_NAME = {spec.name: spec for spec in _SPECS}
BY_CODE = {spec.code: spec for spec in _SPECS}

MUTATORS = tuple(spec.name for spec in _SPECS if spec.mutating)
ACCESSORS = tuple(spec.name for spec in _SPECS if not spec.mutating)


def get(name_or_code: str | int) -> FunctionSpec:
    table = BY_CODE if isinstance(name_or_code, int) else BY_NAME
    spec = table.get(name_or_code)
    if spec is None:
        raise UnknownFunction(f"unrecognized function {name_or_code!r}")
    return spec


def encode_arg(kind: ArgKind, value) -> bytes:
    """Fixed-width value bytes for one argument (before length prefixing)."""
    if kind is ArgKind.U64:
        if not isinstance(value, int) or value < 0 or value >= 1 << 64:
            raise BadRequest("argument must be an unsigned 64-bit integer")
        return codec.u64(value)
    if kind is ArgKind.TEXT:
        if not isinstance(value, str):
            raise BadRequest("argument must be text")
        return value.encode("utf-8")
    if kind is ArgKind.DIGEST:
        return codec.require_digest(value)
    if kind is ArgKind.KEY:
        return codec.require_key(value)
    raise AssertionError(kind)


def decode_arg(kind: ArgKind, raw: bytes):
    if kind is ArgKind.U64:
        if len(raw) != 8:
            raise ValueError("u64 argument must be 8 bytes")
        return int.from_bytes(raw, "big")
    if kind is ArgKind.TEXT:
        return raw.decode("utf-8")
    if kind is ArgKind.DIGEST:
        return codec.require_digest(raw)
    if kind is ArgKind.KEY:
        return codec.require_key(raw)
    raise AssertionError(kind)


def check_args(spec: FunctionSpec, args: dict) -> dict:
    """Validate presence, order-independence and types; returns a clean map."""
    expected = [name for name, _ in spec.args]
    missing = [name for name in expected if name not in args]
    extra = [name for name in args if name not in expected]
    if missing or extra:
        raise BadRequest(
            f"{spec.name} arguments mismatch (missing={missing}, unexpected={extra})")
    clean = {}
    for name, kind in spec.args:
        # encode/decode roundtrip doubles as a type check
        clean[name] = decode_arg(kind, encode_arg(kind, args[name]))
    return clean


def args_to_wire(spec: FunctionSpec, args: dict) -> dict:
    """JSON-safe rendering: binary values as lowercase hex."""
    wire = {}
    for name, kind in spec.args:
        value = args[name]
        wire[name] = value.hex() if kind in (ArgKind.DIGEST, ArgKind.KEY) else value
    return wire


def args_from_wire(spec: FunctionSpec, wire: dict) -> dict:
    args = {}
    for name, kind in spec.args:
        if name not in wire:
            raise BadRequest(f"{spec.name} missing argument {name!r}")
        value = wire[name]
        if kind in (ArgKind.DIGEST, ArgKind.KEY):
            try:
                value = codec.from_hex(value, codec.DIGEST_LEN, name)
            except ValueError as exc:
                raise BadRequest(str(exc)) from None
        args[name] = value
    extra = [name for name in wire if name not in {n for n, _ in spec.args}]
    if extra:
        raise BadRequest(f"{spec.name} unexpected arguments {extra}")
    return args
