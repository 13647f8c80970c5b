"""Identity registry and permission oracle: deny-by-default, purity,
public reads for anyone."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from custodia import functions
from custodia.errors import BadRequest, DuplicateKey, UnknownIdentity
from custodia.keys import KeyPair
from custodia.registry import IdentityRegistry
from custodia.state import Case, Event

ADMIN = KeyPair.generate()
P1 = KeyPair.generate()
I1 = KeyPair.generate()
A1 = KeyPair.generate()
STRANGER = KeyPair.generate()


@pytest.fixture
def registry():
    reg = IdentityRegistry(ADMIN.public)
    reg.register(P1.public, "prosecutor", "DA", 100)
    reg.register(I1.public, "investigator", "IA", 110)
    reg.register(A1.public, "auditor", "compliance", 120)
    return reg


def make_case(responsible=P1, investigators=(I1,)):
    return Case(case_id=0, name="c", description="d", responsible=responsible.public,
                global_id="g", created_at_ms=0, case_hash=b"\x00" * 32, status="open",
                investigators=[responsible.public] + [k.public for k in investigators])


def make_event(creator=I1):
    return Event(event_id=0, case_id=0, type="analysis", description="d",
                 status="active", evidence_hash=b"\x01" * 32, created_at_ms=0,
                 custody=[(creator.public, 0)])


def test_register_and_lookup(registry):
    identity = registry.lookup(P1.public)
    assert identity.role == "prosecutor" and identity.display_name == "DA"
    assert registry.role_of(STRANGER.public) is None
    with pytest.raises(UnknownIdentity):
        registry.lookup(STRANGER.public)


def test_duplicate_and_bad_role(registry):
    with pytest.raises(DuplicateKey):
        registry.register(P1.public, "auditor", "again", 200)
    with pytest.raises(DuplicateKey):
        registry.register(ADMIN.public, "prosecutor", "admin-as-identity", 200)
    with pytest.raises(BadRequest):
        registry.register(KeyPair.generate().public, "sheriff", "x", 200)


def test_export_lines_format(registry):
    lines = registry.export_lines()
    assert len(lines) == 3
    for line in lines:
        key_hex, role, name = line.split(" ", 2)
        assert len(key_hex) == 64 and role in ("prosecutor", "investigator", "auditor")
        int(key_hex, 16)


def test_public_reads_allow_unregistered(registry):
    for fn in ("f7", "f8", "f9", "f10", "f11", "f14", "f15", "f16", "f17", "f18", "f19"):
        decision = registry.check_permission(STRANGER.public, fn)
        assert decision.allowed, fn


def test_roster_scoped_rules(registry):
    case = make_case()
    # investigator on roster may add events; off-roster identical role may not
    assert registry.check_permission(I1.public, "f12", case=case).allowed
    other = KeyPair.generate()
    registry.register(other.public, "investigator", "other", 130)
    assert not registry.check_permission(other.public, "f12", case=case).allowed
    # auditor denied everything restricted
    for fn in ("f2", "f3", "f4", "f5", "f6", "f12", "f13", "fX-custody"):
        assert not registry.check_permission(A1.public, fn, case=case,
                                             event=make_event()).allowed, fn


def test_custody_rule_owner_or_responsible(registry):
    case = make_case()
    event = make_event(creator=I1)
    assert registry.check_permission(I1.public, "fX-custody", case=case,
                                     event=event).allowed
    assert registry.check_permission(P1.public, "fX-custody", case=case,
                                     event=event).allowed     # responsible
    other = KeyPair.generate()
    registry.register(other.public, "investigator", "other", 140)
    case.investigators.append(other.public)
    assert not registry.check_permission(other.public, "fX-custody", case=case,
                                         event=event).allowed


def test_missing_context_denies(registry):
    assert not registry.check_permission(I1.public, "f12").allowed
    assert not registry.check_permission(I1.public, "fX-custody").allowed


def test_admin_only_bootstrap(registry):
    for fn in ("f1", "fX-register"):
        assert registry.check_permission(ADMIN.public, fn).allowed
        for caller in (P1, I1, A1, STRANGER):
            assert not registry.check_permission(caller.public, fn).allowed


def test_purity_same_inputs_same_decision(registry):
    case = make_case()
    for fn in ("f2", "f12", "f7", "fX-custody"):
        first = registry.check_permission(I1.public, fn, case=case, event=make_event())
        second = registry.check_permission(I1.public, fn, case=case, event=make_event())
        assert first == second


_RESTRICTED = [spec.name for spec in functions.BY_NAME.values() if not spec.public]


@given(
    fn=st.sampled_from(_RESTRICTED),
    caller_seed=st.integers(min_value=0, max_value=2**32 - 1),
    with_case=st.booleans(),
)
def test_deny_by_default_random_unmatched_callers(fn, caller_seed, with_case):
    """Callers matching no allow rule are always denied."""
    reg = IdentityRegistry(ADMIN.public)
    reg.register(P1.public, "prosecutor", "DA", 100)
    unknown = KeyPair.generate(seed=caller_seed.to_bytes(32, "big")).public
    case = make_case() if with_case else None
    decision = reg.check_permission(unknown, fn, case=case)
    assert not decision.allowed
    assert decision.reason
