"""Error hierarchy shared by every custodia module.

Each error carries a stable ``code`` (mirrored by the API wire format and
the CLI exit-code table) so callers can dispatch without string matching.
"""

from __future__ import annotations


class CustodiaError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "InternalError"
    exit_code = 1
    http_status = 500

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


# -- ledger ------------------------------------------------------------------

class SignatureInvalid(CustodiaError):
    code = "SignatureInvalid"
    exit_code = 11
    http_status = 401


class TimestampRegression(CustodiaError):
    code = "TimestampRegression"
    exit_code = 12
    http_status = 409


class UnknownFunction(CustodiaError):
    code = "UnknownFunction"
    exit_code = 13
    http_status = 422


class NotFound(CustodiaError):
    """Ledger lookup miss (block height or transaction id)."""

    code = "NotFound"
    exit_code = 14
    http_status = 404


class CorruptChain(CustodiaError):
    code = "CorruptChain"
    exit_code = 15
    http_status = 500


# -- forensic state ----------------------------------------------------------

class AlreadyInitialized(CustodiaError):
    code = "AlreadyInitialized"
    exit_code = 20
    http_status = 409


class NotInitialized(CustodiaError):
    code = "NotInitialized"
    exit_code = 21
    http_status = 409


class PermissionDenied(CustodiaError):
    code = "PermissionDenied"
    exit_code = 22
    http_status = 403


class UnknownCase(CustodiaError):
    code = "UnknownCase"
    exit_code = 23
    http_status = 404


class UnknownEvent(CustodiaError):
    code = "UnknownEvent"
    exit_code = 24
    http_status = 404


class UnknownStatus(CustodiaError):
    code = "UnknownStatus"
    exit_code = 25
    http_status = 422


class UnknownEventType(CustodiaError):
    code = "UnknownEventType"
    exit_code = 26
    http_status = 422


class CaseClosed(CustodiaError):
    code = "CaseClosed"
    exit_code = 27
    http_status = 409


# -- access control ----------------------------------------------------------

class UnknownIdentity(CustodiaError):
    code = "UnknownIdentity"
    exit_code = 30
    http_status = 404


class DuplicateKey(CustodiaError):
    code = "DuplicateKey"
    exit_code = 31
    http_status = 409


# -- evidence store ----------------------------------------------------------

class BlobNotFound(CustodiaError):
    code = "BlobNotFound"
    exit_code = 40
    http_status = 404


class Purged(CustodiaError):
    code = "Purged"
    exit_code = 41
    http_status = 410


class IntegrityViolation(CustodiaError):
    code = "IntegrityViolation"
    exit_code = 42
    http_status = 500


class NotMarkedDeleted(CustodiaError):
    code = "NotMarkedDeleted"
    exit_code = 43
    http_status = 409


class DescriptorMalformed(CustodiaError):
    code = "DescriptorMalformed"
    exit_code = 44
    http_status = 422


class StorageFull(CustodiaError):
    code = "StorageFull"
    exit_code = 45
    http_status = 507


# -- api service / client ----------------------------------------------------

class NonceReplay(CustodiaError):
    code = "NonceReplay"
    exit_code = 50
    http_status = 409


class BindFailure(CustodiaError):
    code = "BindFailure"
    exit_code = 51
    http_status = 500


class CorruptChainAtStartup(CustodiaError):
    code = "CorruptChainAtStartup"
    exit_code = 52
    http_status = 500


class ConnectionFailed(CustodiaError):
    code = "ConnectionFailed"
    exit_code = 53
    http_status = 502


class BadRequest(CustodiaError):
    """Malformed envelope or argument document (transport layer)."""

    code = "BadRequest"
    exit_code = 54
    http_status = 422


_BY_CODE = {cls.code: cls for cls in list(globals().values())
            if isinstance(cls, type) and issubclass(cls, CustodiaError)}


def error_for_code(code: str, message: str = "") -> CustodiaError:
    """Rebuild a typed error from its wire code (client side)."""
    cls = _BY_CODE.get(code, CustodiaError)
    err = cls(message)
    if cls is CustodiaError:
        err.code = code or cls.code
    return err
