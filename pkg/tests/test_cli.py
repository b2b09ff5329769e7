import json
from pathlib import Path

import pytest

from xtrvmss.cli import (
    EXIT_CHEATER,
    EXIT_COLLISION,
    EXIT_CONSTRAINT,
    EXIT_INSUFFICIENT,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    main,
)
from xtrvmss.formats import registry_from_text

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def dealt(tmp_path):
    """setup, four keys with distinct shadows, registry and a deal, all seeded."""
    d = tmp_path
    assert run("setup", "--lambda", 5, "--seed", 7, "--out", d / "params.txt") == EXIT_OK
    n, seed = 0, 0
    while n < 4:
        seed += 1
        key = d / f"k{n + 1}.txt"
        assert run("keygen", "--params", d / "params.txt", "--id", f"P{n + 1}", "--seed", seed,
                   "--out", key) == EXIT_OK
        code = run("register", "--params", d / "params.txt", "--registry", d / "reg.txt", "--key", key)
        assert code in (EXIT_OK, EXIT_COLLISION)
        n += code == EXIT_OK
    assert run("deal", "--params", d / "params.txt", "--registry", d / "reg.txt", "--secrets", "5,7",
               "--k", 2, "--seed", 1, "--out", d / "b.txt", "--state", d / "st.txt") == EXIT_OK
    for i in range(1, 5):
        assert run("verify", "--bulletin", d / "b.txt", "--key", d / f"k{i}.txt",
                   "--share-out", d / f"s{i}.txt") == EXIT_OK
    return d


def test_setup_golden_and_deterministic(tmp_path):
    for name in ("a.txt", "b.txt"):
        assert run("setup", "--lambda", 5, "--seed", 7, "--out", tmp_path / name) == EXIT_OK
    golden = (GOLDEN / "setup_lambda5_seed7.txt").read_text()
    assert (tmp_path / "a.txt").read_text() == (tmp_path / "b.txt").read_text() == golden


def test_setup_rejects_small_lambda(tmp_path):
    with pytest.raises(SystemExit) as info:
        run("setup", "--lambda", 4, "--out", tmp_path / "p.txt")
    assert info.value.code == EXIT_USAGE


def test_setup_with_fixed_primes(tmp_path):
    assert run("setup", "--lambda", 5, "--p", 23, "--q", 13, "--seed", 1, "--out", tmp_path / "p.txt") == EXIT_OK
    assert "p=23" in (tmp_path / "p.txt").read_text()
    assert run("setup", "--lambda", 5, "--p", 23, "--q", 11, "--out", tmp_path / "p.txt") == EXIT_CONSTRAINT


def test_deal_golden(dealt, capsys):
    assert (dealt / "b.txt").read_text() == (GOLDEN / "bulletin_cli_seed1.txt").read_text()
    assert len(registry_from_text((dealt / "reg.txt").read_text(), 17)) == 4


def test_deal_prints_count(dealt, capsys):
    run("deal", "--params", dealt / "params.txt", "--registry", dealt / "reg.txt", "--secrets", "1,2,3",
        "--k", 2, "--seed", 3, "--out", dealt / "b2.txt", "--state", dealt / "st2.txt")
    assert "public items: 24 (3m+l+9 = 24)" in capsys.readouterr().out


def test_deal_errors(dealt):
    common = ["deal", "--params", dealt / "params.txt", "--registry", dealt / "reg.txt",
              "--out", dealt / "x.txt", "--state", dealt / "y.txt"]
    assert run(*common, "--secrets", "5,0", "--k", 2) == EXIT_CONSTRAINT
    assert run(*common, "--secrets", "5", "--k", 5) == EXIT_CONSTRAINT


def test_duplicate_registration(dealt):
    assert run("register", "--params", dealt / "params.txt", "--registry", dealt / "reg.txt",
               "--key", dealt / "k1.txt") == EXIT_CONSTRAINT


def test_recover_both_ways(dealt, capsys):
    capsys.readouterr()
    assert run("recover", "--bulletin", dealt / "b.txt", "--shares", dealt / "s1.txt", dealt / "s4.txt") == EXIT_OK
    a = capsys.readouterr().out
    assert run("recover", "--bulletin", dealt / "b.txt", "--shares", dealt / "s2.txt", dealt / "s3.txt",
               "--way", "consecutive") == EXIT_OK
    assert a == capsys.readouterr().out == "S_1=5\nS_2=7\n"


def test_recover_failures(dealt, capsys):
    assert run("recover", "--bulletin", dealt / "b.txt", "--shares", dealt / "s1.txt") == EXIT_INSUFFICIENT
    text = (dealt / "s1.txt").read_text()
    u = int(text.split("u=")[1])
    (dealt / "bad.txt").write_text(text.replace(f"u={u}", f"u={(u + 1) % 13}"))
    capsys.readouterr()
    assert run("recover", "--bulletin", dealt / "b.txt", "--shares", dealt / "bad.txt", dealt / "s2.txt") == EXIT_CHEATER
    assert "P1" in capsys.readouterr().err


def test_verify_failures(dealt, capsys):
    assert run("tamper", "--bulletin", dealt / "b.txt", "--state", dealt / "st.txt", "--target",
               "init-subshadow", "--index", 1, "--seed", 1, "--out", dealt / "t.txt") == EXIT_OK
    capsys.readouterr()
    assert run("verify", "--bulletin", dealt / "t.txt", "--key", dealt / "k1.txt") == EXIT_VERIFY
    assert "own_1: FAIL" in capsys.readouterr().out
    # someone else's key at index 1
    assert run("verify", "--bulletin", dealt / "b.txt", "--key", dealt / "k2.txt", "--index", 1) == EXIT_VERIFY
    text = (dealt / "b.txt").read_text().replace("items=23", "items=22")
    (dealt / "broken.txt").write_text(text)
    assert run("verify", "--bulletin", dealt / "broken.txt", "--key", dealt / "k1.txt") == EXIT_VERIFY


def test_dynamic_ops(dealt, capsys):
    b, st = dealt / "b.txt", dealt / "st.txt"
    dyn = lambda op, *extra: run("dynamic", op, "--bulletin", b, "--state", st, *extra)  # noqa: E731
    assert dyn("add-secret", "--secret", 9) == EXIT_OK
    capsys.readouterr()
    run("recover", "--bulletin", b, "--shares", dealt / "s1.txt", dealt / "s3.txt")
    assert capsys.readouterr().out == "S_1=5\nS_2=7\nS_3=9\n"
    assert dyn("remove-secret", "--slot", 1) == EXIT_OK
    capsys.readouterr()
    run("recover", "--bulletin", b, "--shares", dealt / "s1.txt", dealt / "s3.txt")
    assert capsys.readouterr().out == "S_2=7\nS_3=9\n"
    assert dyn("remove-participant", "--id", "P1") == EXIT_OK
    assert run("recover", "--bulletin", b, "--shares", dealt / "s1.txt", dealt / "s3.txt") == EXIT_CHEATER
    assert dyn("remove-participant", "--id", "P1") == EXIT_CONSTRAINT
    # the freed shadow can be taken by a newcomer
    assert run("dynamic", "add-participant", "--bulletin", b, "--state", st, "--key", dealt / "k1.txt") == EXIT_OK
    assert run("verify", "--bulletin", b, "--key", dealt / "k1.txt", "--share-out", dealt / "n.txt") == EXIT_OK
    capsys.readouterr()
    assert run("recover", "--bulletin", b, "--shares", dealt / "n.txt", dealt / "s2.txt") == EXIT_OK
    assert capsys.readouterr().out == "S_2=7\nS_3=9\n"
    assert dyn("change-threshold", "--k", 3, "--seed", 2) == EXIT_OK
    assert run("recover", "--bulletin", b, "--shares", dealt / "s2.txt", dealt / "s3.txt") != EXIT_OK
    for i in (2, 3, 4):
        assert run("verify", "--bulletin", b, "--key", dealt / f"k{i}.txt", "--share-out", dealt / f"t{i}.txt") == EXIT_OK
    capsys.readouterr()
    assert run("recover", "--bulletin", b, "--shares", dealt / "t2.txt", dealt / "t3.txt") == EXIT_INSUFFICIENT
    assert run("recover", "--bulletin", b, "--shares", dealt / "t2.txt", dealt / "t3.txt", dealt / "t4.txt") == EXIT_OK
    assert sorted(capsys.readouterr().out.split()) == ["S_1=7", "S_2=9"]


@pytest.mark.parametrize("scenario,detected", [
    ("init-subshadow", True), ("mask-subshadow", True), ("E", True), ("T", True), ("c", True),
    ("z", False), ("tail", False), ("control", False),
    ("participant-increment", True), ("participant-relabel", True), ("conspiracy", True),
])
def test_demo_attack(tmp_path, scenario, detected):
    out = tmp_path / "r.jsonl"
    assert run("demo-attack", "--scenario", scenario, "--seed", 4, "--out", out) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["detected"] is detected
    again = tmp_path / "r2.jsonl"
    run("demo-attack", "--scenario", scenario, "--seed", 4, "--out", again)
    assert again.read_bytes() == out.read_bytes()


def test_demo_attack_golden(tmp_path):
    out = tmp_path / "r.jsonl"
    assert run("demo-attack", "--scenario", "init-subshadow", "--seed", 3, "--out", out) == EXIT_OK
    assert out.read_text() == (GOLDEN / "report_init_subshadow_seed3.jsonl").read_text()


def test_demo_coverage_and_session(tmp_path):
    out = tmp_path / "cov.jsonl"
    assert run("demo-attack", "--scenario", "coverage", "--seed", 0, "--out", out) == EXIT_OK
    assert out.read_text() == (GOLDEN / "coverage_toy_scheme1_seed0.jsonl").read_text()
    assert run("demo-attack", "--scenario", "session", "--variant", 2, "--seed", 0, "--out", out) == EXIT_OK
    assert json.loads(out.read_text())["checks_failed"] == []


def test_missing_file(tmp_path):
    assert run("verify", "--bulletin", tmp_path / "none.txt", "--key", tmp_path / "k.txt") == 1
