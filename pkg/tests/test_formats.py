import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from xtrvmss.errors import MalformedBulletinError
from xtrvmss.formats import (
    bulletin_from_text,
    bulletin_to_text,
    count_items,
    key_from_text,
    key_to_text,
    registry_from_text,
    registry_to_text,
    share_from_text,
    share_to_text,
    state_from_text,
    state_to_text,
    write_atomic,
)
from xtrvmss.harness import build_session
from xtrvmss.vmss import RecoveryShare, Scheme, SchemeConfig, add_secret, expected_public_items, remove_secret

GOLDEN = Path(__file__).parent / "golden"


def toy_session(toy, seed=42, scheme=Scheme.SCHEME1):
    return build_session(toy, SchemeConfig(scheme, 2, 4, 2), random.Random(seed))


def test_bulletin_golden(toy):
    text = bulletin_to_text(toy_session(toy).bulletin)
    assert text == (GOLDEN / "bulletin_toy_seed42.txt").read_text()


@given(st.sampled_from(list(Scheme)), st.integers(1, 4), st.integers(0, 4), st.integers(1, 3),
       st.integers(0, 2**32))
@settings(max_examples=20, deadline=None)
def test_bulletin_round_trip_and_count(mid, scheme, k, extra, l, seed):
    m = k + extra
    s = build_session(mid, SchemeConfig(scheme, k, m, l), random.Random(seed))
    text = bulletin_to_text(s.bulletin)
    again = bulletin_from_text(text)
    assert again == s.bulletin
    assert bulletin_to_text(again) == text
    assert count_items(text) == expected_public_items(m, l)


def test_removed_slot_absent(toy):
    s = toy_session(toy)
    b = remove_secret(s.bulletin, 1)
    text = bulletin_to_text(b)
    assert "z=1;" not in text and "z=2;" in text
    assert bulletin_from_text(text) == b


def test_registry_round_trip(toy):
    reg = toy_session(toy).bulletin.registry
    assert registry_from_text(registry_to_text(reg), toy.p) == reg


@pytest.mark.parametrize("mutate", [
    lambda t: t.replace("# xtrvmss bulletin v1", "# something else"),
    lambda t: t.replace("items=23", "items=24"),
    lambda t: t.replace("[integrity]\nitems=23\n", ""),
    lambda t: "\n".join(ln for ln in t.splitlines() if not ln.startswith("E=1;")) + "\n",
    lambda t: t.replace("c=", "c=x"),
    lambda t: t.replace("scheme=1", "scheme=1\nscheme=2"),
    lambda t: t.replace("p=23", "p=29"),
])
def test_malformed_bulletins_rejected(toy, mutate):
    text = bulletin_to_text(toy_session(toy).bulletin)
    with pytest.raises((MalformedBulletinError, ValueError)):
        bulletin_from_text(mutate(text))


def test_state_round_trip(mid):
    s = build_session(mid, SchemeConfig(Scheme.SCHEME2, 3, 5, 2), random.Random(1))
    assert state_from_text(state_to_text(s.state)) == s.state
    _, st2 = add_secret(s.bulletin, s.state, 99)
    assert state_from_text(state_to_text(st2)) == st2


def test_key_and_share_round_trip(toy):
    s = toy_session(toy)
    ident, kp = next(iter(s.keys.items()))
    assert key_from_text(key_to_text(ident, kp), toy.p) == (ident, kp)
    share = RecoveryShare(ident, 3, 7)
    assert share_from_text(share_to_text(share)) == share


def test_write_atomic_replaces(tmp_path):
    path = tmp_path / "f.txt"
    write_atomic(path, "one\n")
    write_atomic(path, "two\n")
    assert path.read_text() == "two\n"
    assert [p.name for p in tmp_path.iterdir()] == ["f.txt"]
