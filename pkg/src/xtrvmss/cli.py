"""Command-line front end over parameter, key, registry, bulletin and share files.

Exit codes: 0 success, 1 other failure, 2 usage, 3 parameter or constraint
violation, 4 verification failure, 5 cheater detected, 6 insufficient
shares, 7 public-shadow collision (generate a new key and retry).
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import replace
from pathlib import Path

from .errors import (
    CheaterError,
    ConstraintError,
    GenerationError,
    IdentityError,
    InsufficientSharesError,
    MalformedBulletinError,
    ParameterError,
    ShadowCollisionError,
    VmssError,
)
from .formats import (
    bulletin_from_text,
    bulletin_to_text,
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
from .harness import (
    TOY_CONFIG,
    Mode,
    Session,
    Target,
    TamperSpec,
    build_session,
    coverage_matrix,
    reports_to_jsonl,
    run_dealer_attack,
    run_participant_cheat,
    run_session,
    tamper_bulletin,
)
from .vmss import (
    RecoveryShare,
    Registry,
    Scheme,
    SchemeConfig,
    Way,
    add_participant,
    add_secret,
    change_threshold,
    check_subgroup,
    deal,
    expected_public_items,
    extract_subshadow,
    recover,
    register,
    remove_participant,
    remove_secret,
    verify_consistency,
    verify_own,
)
from .xtr import (
    MIN_LAMBDA,
    generate_params,
    keygen,
    params_from_primes,
    params_from_text,
    params_to_text,
)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_USAGE = 2
EXIT_CONSTRAINT = 3
EXIT_VERIFY = 4
EXIT_CHEATER = 5
EXIT_INSUFFICIENT = 6
EXIT_COLLISION = 7

TOY_P, TOY_Q = 23, 13


class CommandFailed(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _rng(seed: int | None) -> random.Random:
    return random.Random(seed) if seed is not None else random.SystemRandom()


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _lambda(text: str) -> int:
    value = int(text)
    if value < MIN_LAMBDA:
        raise argparse.ArgumentTypeError(f"lambda must be at least {MIN_LAMBDA}")
    return value


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(",", " ").split()]


def _load_params(path: str | None, seed: int | None):
    if path:
        return params_from_text(_read(path))
    return params_from_primes(TOY_P, TOY_Q, _rng(seed if seed is not None else 0), lam=5)


# -- commands -----------------------------------------------------------------

def cmd_setup(args) -> int:
    rng = _rng(args.seed)
    if args.p is not None or args.q is not None:
        if args.p is None or args.q is None:
            raise ParameterError("--p and --q must be given together")
        params = params_from_primes(args.p, args.q, rng, lam=args.lam)
    else:
        params = generate_params(args.lam, rng)
    write_atomic(args.out, params_to_text(params))
    print(f"wrote {args.out}: p has {params.p.bit_length()} bits, q={params.q}")
    return EXIT_OK


def cmd_keygen(args) -> int:
    params = params_from_text(_read(args.params))
    kp = keygen(params, _rng(args.seed))
    write_atomic(args.out, key_to_text(args.id, kp))
    print(f"wrote {args.out} for {args.id}")
    print("note: the key file holds the private exponent; restrict its permissions", file=sys.stderr)
    return EXIT_OK


def cmd_register(args) -> int:
    params = params_from_text(_read(args.params))
    path = Path(args.registry)
    registry = registry_from_text(path.read_text(encoding="utf-8"), params.p) if path.exists() \
        else Registry()
    added = []
    for key_path in args.key:
        ident, kp = key_from_text(_read(key_path), params.p)
        registry = register(params, registry, ident, kp.y)
        added.append(ident)
    write_atomic(path, registry_to_text(registry))
    for ident in added:
        print(f"registered {ident} at index {registry.find(ident).index}")
    return EXIT_OK


def _secrets(args) -> list[int]:
    if args.secrets_file:
        return _int_list(_read(args.secrets_file))
    return _int_list(args.secrets)


def cmd_deal(args) -> int:
    params = params_from_text(_read(args.params))
    registry = registry_from_text(_read(args.registry), params.p)
    secrets = _secrets(args)
    config = SchemeConfig(Scheme(args.variant), args.k, len(registry), len(secrets))
    bulletin, state = deal(params, config, registry, secrets, _rng(args.seed))
    text = bulletin_to_text(bulletin)
    expected = expected_public_items(config.m, config.l)
    count = bulletin.count_public_items()
    write_atomic(args.out, text)
    write_atomic(args.state, state_to_text(state))
    print(f"public items: {count} (3m+l+9 = {expected})")
    if count != expected:
        raise CommandFailed(f"public item count {count} differs from {expected}", EXIT_OTHER)
    return EXIT_OK


def cmd_verify(args) -> int:
    bulletin = bulletin_from_text(_read(args.bulletin))
    params = bulletin.params
    ident, kp = key_from_text(_read(args.key), params.p)
    entry = bulletin.registry.find(ident)
    index = args.index if args.index is not None else (entry.index if entry else None)
    if index is None:
        raise IdentityError(f"{ident!r} is not in the bulletin registry")
    failures = []
    try:
        u = extract_subshadow(params, bulletin, index, kp.x)
        own = verify_own(params, bulletin, index, u)
    except VmssError as exc:
        u, own = None, False
        print(f"extract_{index}: FAIL ({exc})")
    print(f"own_{index}: {'ok' if own else 'FAIL'}")
    if not own:
        failures.append(f"own_{index}")
    try:
        check_subgroup(params, bulletin)
        for i, ok in verify_consistency(params, bulletin):
            print(f"consistency_{i}: {'ok' if ok else 'FAIL'}")
            if not ok:
                failures.append(f"consistency_{i}")
    except MalformedBulletinError as exc:
        print(f"subgroup_{exc.index}: FAIL")
        failures.append(f"subgroup_{exc.index}")
    if failures:
        raise CommandFailed("verification failed: " + ", ".join(failures), EXIT_VERIFY)
    if args.share_out:
        write_atomic(args.share_out, share_to_text(RecoveryShare(ident, index, u)))
        print(f"wrote {args.share_out}")
    return EXIT_OK


def cmd_recover(args) -> int:
    bulletin = bulletin_from_text(_read(args.bulletin))
    shares = [share_from_text(_read(p)) for p in args.shares]
    secrets = recover(bulletin.params, bulletin, shares, Way(args.way), args.method)
    for slot in sorted(secrets):
        print(f"S_{slot}={secrets[slot]}")
    return EXIT_OK


def _load_dealer(args):
    bulletin = bulletin_from_text(_read(args.bulletin))
    return bulletin, state_from_text(_read(args.state))


def _save_dealer(args, bulletin, state) -> None:
    write_atomic(args.bulletin, bulletin_to_text(bulletin))
    write_atomic(args.state, state_to_text(state))
    print(f"public items: {bulletin.count_public_items()}")


def cmd_dynamic(args) -> int:
    bulletin, state = _load_dealer(args)
    params = bulletin.params
    if args.op == "add-participant":
        ident, kp = key_from_text(_read(args.key), params.p)
        bulletin, state = add_participant(params, bulletin, state, ident, kp.y)
        print(f"added {ident} at index {bulletin.registry.find(ident).index}")
    elif args.op == "remove-participant":
        bulletin = remove_participant(bulletin, args.id)
        print(f"removed {args.id}")
    elif args.op == "add-secret":
        bulletin, state = add_secret(bulletin, state, args.secret)
        print(f"added secret in slot {state.next_slot - 1}")
    elif args.op == "remove-secret":
        bulletin = remove_secret(bulletin, args.slot)
        print(f"removed secret in slot {args.slot}")
    else:
        live = {mk.slot for mk in bulletin.masks}
        secrets = [s for slot, _, s in sorted(state.secrets) if slot in live]
        config = SchemeConfig(bulletin.scheme, bulletin.k, len(bulletin.registry), max(len(secrets), 1))
        bulletin, state = change_threshold(params, config, bulletin.registry, secrets, args.k,
                                           _rng(args.seed))
        print(f"re-dealt with k={args.k}")
    _save_dealer(args, bulletin, state)
    return EXIT_OK


def cmd_tamper(args) -> int:
    bulletin, state = _load_dealer(args)
    config = SchemeConfig(bulletin.scheme, bulletin.k, len(bulletin.commitments), len(bulletin.masks))
    session = Session(bulletin.params, config, {}, (), bulletin, state)
    spec = TamperSpec(Target(args.target), args.index, Mode(args.mode), args.other)
    tampered, changed = tamper_bulletin(session, spec, _rng(args.seed))
    write_atomic(args.out, bulletin_to_text(tampered))
    print(f"tampered: {', '.join(changed) or 'nothing'}")
    return EXIT_OK


DEMO_SCENARIOS = ("init-subshadow", "mask-subshadow", "E", "T", "z", "c", "tail", "control",
                  "participant-increment", "participant-relabel", "conspiracy", "coverage", "session")


def cmd_demo_attack(args) -> int:
    seed = args.seed if args.seed is not None else 0
    params = _load_params(args.params, seed)
    config = replace(TOY_CONFIG, scheme=Scheme(args.variant), k=args.k, m=args.m, l=args.l)
    rng = random.Random(seed)
    name = args.scenario
    if name == "coverage":
        reports = coverage_matrix(params, config, seed)
    elif name == "session":
        reports = [run_session(params, config, rng)]
    elif name.startswith("participant") or name == "conspiracy":
        session = build_session(params, config, rng)
        mode = {"participant-increment": "increment", "participant-relabel": "relabel",
                "conspiracy": "swap"}[name]
        index = args.index if args.index is not None else 1
        reports = [run_participant_cheat(session, index, mode, rng, Way(args.way))]
    else:
        if name == "control":
            spec = TamperSpec(Target.INIT, 1, Mode.IDENTITY)
        else:
            target = Target(name)
            index = args.index if args.index is not None else {
                Target.INIT: 1, Target.MASK: config.k + 1, Target.C: 0}.get(target, 1)
            mode = Mode(args.mode)
            other = args.other
            if mode is Mode.SWAP and other is None:
                other = 1 if index != 1 else 2
            spec = TamperSpec(target, index, mode, other)
        reports = [run_dealer_attack(params, config, spec, rng)]
    text = reports_to_jsonl(reports)
    if args.out:
        write_atomic(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    for r in reports:
        print(f"{r.scenario}: detected={str(r.detected).lower()}", file=sys.stderr)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xtrvmss",
                                     description="XTR-based verifiable multi-secret sharing")
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=int, default=None, help="deterministic RNG seed")
        return p

    p = seeded(sub.add_parser("setup", help="generate public parameters"))
    p.add_argument("--lambda", dest="lam", type=_lambda, required=True, help="bit length of p")
    p.add_argument("--p", type=int, help="use this prime p (with --q)")
    p.add_argument("--q", type=int, help="use this prime q (with --p)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_setup)

    p = seeded(sub.add_parser("keygen", help="create a participant key file"))
    p.add_argument("--params", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("register", help="add public shadows to a registry file")
    p.add_argument("--params", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--key", required=True, action="append", help="key file (repeatable)")
    p.set_defaults(func=cmd_register)

    p = seeded(sub.add_parser("deal", help="share secrets and publish a bulletin"))
    p.add_argument("--params", required=True)
    p.add_argument("--registry", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--secrets", help="comma-separated decimal secrets")
    group.add_argument("--secrets-file")
    p.add_argument("--variant", type=int, choices=(1, 2), default=1)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="bulletin file")
    p.add_argument("--state", required=True, help="private dealer state file")
    p.set_defaults(func=cmd_deal)

    p = sub.add_parser("verify", help="participant-side checks against a bulletin")
    p.add_argument("--bulletin", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--index", type=int)
    p.add_argument("--share-out", help="write the extracted recovery share here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("recover", help="reconstruct secrets from share files")
    p.add_argument("--bulletin", required=True)
    p.add_argument("--shares", nargs="+", required=True)
    p.add_argument("--way", choices=[w.value for w in Way], default=Way.INTERPOLATION.value)
    p.add_argument("--method", choices=("lagrange", "gauss"), default="lagrange",
                   help="interpolation solver")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("dynamic", help="dealer-side updates")
    ops = p.add_subparsers(dest="op", required=True)
    for op in ("add-participant", "remove-participant", "add-secret", "remove-secret",
               "change-threshold"):
        q = seeded(ops.add_parser(op))
        q.add_argument("--bulletin", required=True)
        q.add_argument("--state", required=True)
        if op == "add-participant":
            q.add_argument("--key", required=True)
        elif op == "remove-participant":
            q.add_argument("--id", required=True)
        elif op == "add-secret":
            q.add_argument("--secret", type=int, required=True)
        elif op == "remove-secret":
            q.add_argument("--slot", type=int, required=True)
        else:
            q.add_argument("--k", type=int, required=True)
        q.set_defaults(func=cmd_dynamic)

    p = seeded(sub.add_parser("demo-attack", help="run a harness scenario and write its report"))
    p.add_argument("--scenario", choices=DEMO_SCENARIOS, required=True)
    p.add_argument("--params", help="parameter file (default: p=23, q=13)")
    p.add_argument("--variant", type=int, choices=(1, 2), default=1)
    p.add_argument("--k", type=int, default=TOY_CONFIG.k)
    p.add_argument("--m", type=int, default=TOY_CONFIG.m)
    p.add_argument("--l", type=int, default=TOY_CONFIG.l)
    p.add_argument("--index", type=int)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.INCREMENT.value)
    p.add_argument("--other", type=int, help="swap partner")
    p.add_argument("--way", choices=[w.value for w in Way], default=Way.INTERPOLATION.value)
    p.add_argument("--out", help="report file (JSON Lines); stdout if omitted")
    p.set_defaults(func=cmd_demo_attack)

    p = seeded(sub.add_parser("tamper", help="write a dealer-tampered copy of a bulletin"))
    p.add_argument("--bulletin", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--target", choices=[t.value for t in Target], required=True)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.INCREMENT.value)
    p.add_argument("--other", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tamper)
    return parser


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, CommandFailed):
        return exc.code
    if isinstance(exc, CheaterError):
        return EXIT_CHEATER
    if isinstance(exc, InsufficientSharesError):
        return EXIT_INSUFFICIENT
    if isinstance(exc, ShadowCollisionError):
        return EXIT_COLLISION
    if isinstance(exc, MalformedBulletinError):
        return EXIT_VERIFY
    if isinstance(exc, (ParameterError, ConstraintError, IdentityError, GenerationError)):
        return EXIT_CONSTRAINT
    return EXIT_OTHER


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VmssError, CommandFailed, OSError, ValueError, KeyError) as exc:
        code = exit_code_for(exc)
        message = str(exc)
        if isinstance(exc, ShadowCollisionError):
            message += " (generate a new key with `keygen` and register again)"
        elif isinstance(exc, KeyError):
            message = f"missing field {exc}"
        print(f"error: {message}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
