"""Identity registry and permission oracle.

Public (P) functions are readable by anyone, registered or not.
Restricted (R) functions are deny-by-default: a caller passes only if an
explicit per-function rule fires. Prosecutors open and close
investigations and manage staffing; investigators act only within cases
they are assigned to; auditors hold read-only credentials and can never
mutate. The bootstrap admin credential (config-supplied) exists solely
to create the contract and register identities.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import codec, functions
from .errors import BadRequest, DuplicateKey, UnknownIdentity

ROLE_PROSECUTOR = "prosecutor"
ROLE_INVESTIGATOR = "investigator"
ROLE_AUDITOR = "auditor"
ROLES = (ROLE_PROSECUTOR, ROLE_INVESTIGATOR, ROLE_AUDITOR)


@dataclass(frozen=True)
class Identity:
    key: bytes
    role: str
    display_name: str
    registered_at_ms: int

    def to_dict(self) -> dict:
        return {
            "key": self.key.hex(),
            "role": self.role,
            "displayName": self.display_name,
            "registeredAtMs": self.registered_at_ms,
        }


@dataclass(frozen=True)
class PermissionDecision:
    allowed: bool
    reason: str


class IdentityRegistry:
    """Key -> identity map; mutations arrive only via ledger transactions."""

    def __init__(self, admin_key: bytes):
        self.admin_key = codec.require_key(admin_key, "admin key")
        self._by_key: dict[bytes, Identity] = {}

    def register(self, key: bytes, role: str, display_name: str,
                 registered_at_ms: int) -> Identity:
        codec.require_key(key)
        if role not in ROLES:
            raise BadRequest(f"unknown role {role!r}; expected one of {ROLES}")
        if key in self._by_key or key == self.admin_key:
            raise DuplicateKey(f"key {key.hex()} already registered")
        identity = Identity(key, role, display_name, registered_at_ms)
        self._by_key[key] = identity
        return identity

    def lookup(self, key: bytes) -> Identity:
        identity = self._by_key.get(key)
        if identity is None:
            raise UnknownIdentity(f"key {key.hex()} is not registered")
        return identity

    def is_registered(self, key: bytes) -> bool:
        return key in self._by_key

    def role_of(self, key: bytes) -> str | None:
        identity = self._by_key.get(key)
        return identity.role if identity else None

    def identities(self) -> list[Identity]:
        return sorted(self._by_key.values(), key=lambda i: (i.registered_at_ms, i.key))

    def export_lines(self) -> list[str]:
        """One line per identity: "hex-key role displayName"."""
        return [f"{i.key.hex()} {i.role} {i.display_name}" for i in self.identities()]

    # -- permission oracle ------------------------------------------------

    def check_permission(self, caller_key: bytes, function: str,
                         case=None, event=None) -> PermissionDecision:
        """Pure decision for (caller, function) against current rosters.

        ``case`` and ``event`` supply context for roster- and
        custody-scoped rules; absence of required context denies.
        Never raises: denial is a decision, not an error.
        """
        spec = functions.get(function)
        if spec.public:
            return PermissionDecision(True, "public read access")

        if spec.name in ("f1", "fX-register"):
            if caller_key == self.admin_key:
                return PermissionDecision(True, "bootstrap admin credential")
            return PermissionDecision(False, "requires the bootstrap admin credential")

        identity = self._by_key.get(caller_key)
        if identity is None:
            return PermissionDecision(False, "caller is not a registered identity")
        role = identity.role

        if spec.name in ("f2", "f4", "f5"):
            if role == ROLE_PROSECUTOR:
                return PermissionDecision(True, f"prosecutor may invoke {spec.name}")
            return PermissionDecision(False, f"{spec.name} requires prosecutor role")

        if spec.name in ("f3", "f12", "f13"):
            if case is None:
                return PermissionDecision(False, "case context required")
            if caller_key == case.responsible or caller_key in case.investigators:
                return PermissionDecision(True, "caller is on the case roster")
            return PermissionDecision(False, "caller is not assigned to this case")

        if spec.name == "f6":
            if role == ROLE_PROSECUTOR:
                return PermissionDecision(True, "prosecutor may assign investigators")
            if case is not None and caller_key == case.responsible:
                return PermissionDecision(True, "caller is the case responsible")
            return PermissionDecision(False, "f6 requires prosecutor or case responsible")

        if spec.name == "fX-custody":
            if case is not None and caller_key == case.responsible:
                return PermissionDecision(True, "caller is the case responsible")
            if event is not None and event.custody and event.custody[-1][0] == caller_key:
                return PermissionDecision(True, "caller is the current custody owner")
            return PermissionDecision(
                False, "custody transfer requires current owner or case responsible")

        return PermissionDecision(False, f"no allow rule for {spec.name}")
