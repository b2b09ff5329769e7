"""Adversarial and end-to-end scenario driver.

Dealer attacks substitute one value either before the sequence is generated
(an initial term, with the victim still handed the honest value) or after it
(a later term, published with a matching E/T pair), or corrupt a published
item directly.  Every scenario produces a ScenarioReport; reports are plain
data and serialize to JSON Lines with a fixed field order.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
import random
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field, replace

from .errors import (
    BlindingDegenerateError,
    CheaterError,
    GenerationError,
    InsufficientSharesError,
    MalformedBulletinError,
    ParameterError,
    ShadowCollisionError,
    VmssError,
)
from .formats import bulletin_to_text, count_items
from .nlr import NlrSpec, completions, generate
from .vmss import (
    Bulletin,
    Commitment,
    DealerState,
    Mask,
    RecoveryShare,
    Registry,
    Scheme,
    SchemeConfig,
    Way,
    add_participant,
    add_secret,
    change_threshold,
    check_subgroup,
    consistency_instances,
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
from .xtr import XtrKeypair, XtrParams, blinding_factor, keygen

TOY_CONFIG = SchemeConfig(Scheme.SCHEME1, k=2, m=4, l=2)


class Target(enum.Enum):
    E = "E"
    T = "T"
    Z = "z"
    C = "c"
    TAIL = "tail"
    INIT = "init-subshadow"
    MASK = "mask-subshadow"


class Mode(enum.Enum):
    INCREMENT = "increment"
    RANDOMIZE = "randomize"
    SWAP = "swap-with"
    IDENTITY = "identity"


def target_range(target: Target, k: int, m: int, l: int) -> range:
    """Valid tamper indices: participant indices for E/T, term owners for the
    substitutions, slots for z, 1..2 for the tail and 0 for c."""
    return {
        Target.E: range(1, m + 1),
        Target.T: range(1, m + 1),
        Target.INIT: range(1, k + 1),
        Target.MASK: range(k + 1, m + 1),
        Target.Z: range(1, l + 1),
        Target.TAIL: range(1, 3),
        Target.C: range(0, 1),
    }[target]


def _partner_range(target: Target, k: int, m: int, l: int) -> range:
    if target in (Target.INIT, Target.MASK):
        return range(1, m + 1)
    return target_range(target, k, m, l)


@dataclass(frozen=True)
class TamperSpec:
    target: Target
    index: int
    mode: Mode
    other: int | None = None

    def validate(self, config: SchemeConfig) -> None:
        k, m, l = config.k, config.m, config.l
        if self.index not in target_range(self.target, k, m, l):
            raise ParameterError(f"index {self.index} outside the range of {self.target.value}")
        if self.mode is Mode.SWAP:
            if self.target is Target.C:
                raise ParameterError("c has nothing to swap with")
            if self.other is None or self.other == self.index \
                    or self.other not in _partner_range(self.target, k, m, l):
                raise ParameterError(f"invalid swap partner {self.other}")

    @property
    def name(self) -> str:
        mode = self.mode.value + (f"-{self.other}" if self.mode is Mode.SWAP else "")
        return f"{self.target.value}[{self.index}]:{mode}"


@dataclass
class ScenarioReport:
    scenario: str
    tampered: list[str] = field(default_factory=list)
    checks_run: list[str] = field(default_factory=list)
    checks_failed: list[str] = field(default_factory=list)
    detected: bool = False
    detecting_party: list[str] = field(default_factory=list)
    covered: bool = False
    cheaters: list[str] = field(default_factory=list)
    secrets_correct: bool | None = None
    details: dict[str, int | str] = field(default_factory=dict)

    def record(self, name: str, ok: bool, party: str | None = None) -> None:
        self.checks_run.append(name)
        if not ok:
            self.checks_failed.append(name)
            if party and party not in self.detecting_party:
                self.detecting_party.append(party)
        self.detected = bool(self.checks_failed)

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


def reports_to_jsonl(reports: Iterable[ScenarioReport]) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


# -- sessions -----------------------------------------------------------------

@dataclass(frozen=True)
class Session:
    params: XtrParams
    config: SchemeConfig
    keys: dict[str, XtrKeypair]
    secrets: tuple[int, ...]
    bulletin: Bulletin
    state: DealerState

    def share(self, ident: str) -> RecoveryShare:
        entry = self.bulletin.registry.find(ident)
        u = extract_subshadow(self.params, self.bulletin, entry.index, self.keys[ident].x)
        return RecoveryShare(ident, entry.index, u)

    def share_at(self, index: int) -> RecoveryShare:
        return self.share(self.bulletin.registry.at(index).id)


def fresh_keypair(params: XtrParams, registry: Registry, rng: random.Random,
                  attempts: int = 200) -> XtrKeypair:
    """A key whose public shadow is not yet registered."""
    taken = {e.y for e in registry}
    for _ in range(attempts):
        kp = keygen(params, rng)
        if kp.y not in taken:
            return kp
    raise GenerationError(f"no unused public shadow in {attempts} key draws")


def make_participants(params: XtrParams, m: int, rng: random.Random, prefix: str = "P",
                      attempts: int | None = None) -> tuple[Registry, dict[str, XtrKeypair]]:
    """Register m participants with distinct public shadows.

    In a tiny subgroup conjugate exponents share a trace, so only about q/3
    distinct shadows exist; the draw budget keeps that case from looping.
    """
    attempts = attempts if attempts is not None else 50 * m + 100
    registry, keys = Registry(), {}
    for _ in range(attempts):
        if len(registry) == m:
            break
        kp = keygen(params, rng)
        ident = f"{prefix}{len(registry) + 1}"
        try:
            registry = register(params, registry, ident, kp.y)
        except ShadowCollisionError:
            continue
        keys[ident] = kp
    if len(registry) < m:
        raise GenerationError(f"only {len(registry)} distinct public shadows after {attempts} draws")
    return registry, keys


def build_session(params: XtrParams, config: SchemeConfig, rng: random.Random,
                  secrets: Sequence[int] | None = None) -> Session:
    registry, keys = make_participants(params, config.m, rng)
    if secrets is None:
        secrets = [rng.randrange(1, params.q) for _ in range(config.l)]
    bulletin, state = deal(params, config, registry, secrets, rng)
    return Session(params, config, keys, tuple(secrets), bulletin, state)


def participant_checks(params: XtrParams, bulletin: Bulletin, keys: dict[str, XtrKeypair],
                       report: ScenarioReport) -> None:
    """Every registered participant extracts and checks its own term, then the
    public consistency instances are evaluated."""
    for entry in bulletin.registry:
        try:
            u = extract_subshadow(params, bulletin, entry.index, keys[entry.id].x)
            ok = verify_own(params, bulletin, entry.index, u)
        except VmssError:
            ok = False
        report.record(f"own_{entry.index}", ok, f"participant {entry.index}")
    try:
        check_subgroup(params, bulletin)
    except MalformedBulletinError as exc:
        report.record(f"subgroup_{exc.index}", False, "any participant")
        return
    report.record("subgroup", True)
    for i, ok in verify_consistency(params, bulletin):
        report.record(f"consistency_{i}", ok, "any participant")


# -- dealer attacks -----------------------------------------------------------

def _substitute(mode: Mode, honest: int, q: int, rng: random.Random, swap_value: int | None) -> int:
    if mode is Mode.INCREMENT:
        return (honest + 1) % q
    if mode is Mode.RANDOMIZE:
        return rng.choice([v for v in range(q) if v != honest]) if q < 1 << 16 \
            else (honest + rng.randrange(1, q)) % q
    if mode is Mode.SWAP:
        return swap_value
    return honest


def _commitments_from(params: XtrParams, bulletin: Bulletin, b: int, terms: Sequence[int],
                      keep_E: dict[int, int]) -> tuple[Commitment, ...]:
    out = []
    for cm in bulletin.commitments:
        entry = bulletin.registry.at(cm.index)
        u = terms[cm.index - 1]
        E = keep_E.get(cm.index, blinding_factor(entry.y, b, params.q) * u % params.q)
        out.append(Commitment(cm.index, E, params.g_pow(u)))
    return tuple(out)


def tamper_bulletin(session: Session, spec: TamperSpec,
                    rng: random.Random) -> tuple[Bulletin, list[str]]:
    """Apply one tamper and return the bulletin plus the names of changed items."""
    params, bulletin, state = session.params, session.bulletin, session.state
    q = params.q
    spec.validate(session.config)
    t, i, mode = spec.target, spec.index, spec.mode

    if t in (Target.E, Target.T):
        cm = bulletin.commitment(i)
        if t is Target.E:
            swap = bulletin.commitment(spec.other).E if mode is Mode.SWAP else None
            new = replace(cm, E=_substitute(mode, cm.E, q, rng, swap))
        else:
            u = state.terms[i - 1]
            if mode is Mode.SWAP:
                T = bulletin.commitment(spec.other).T
            else:
                T = params.g_pow(_substitute(mode, u, q, rng, None))
            new = replace(cm, T=T)
        commitments = tuple(new if c.index == i else c for c in bulletin.commitments)
        changed = [f"{t.value}_{i}"] if new != cm else []
        return replace(bulletin, commitments=commitments), changed

    if t is Target.Z:
        mk = next(mk for mk in bulletin.masks if mk.slot == i)
        swap = next(m.z for m in bulletin.masks if m.slot == spec.other) if mode is Mode.SWAP else None
        new = replace(mk, z=_substitute(mode, mk.z, q, rng, swap))
        masks = tuple(new if m.slot == i else m for m in bulletin.masks)
        return replace(bulletin, masks=masks), [f"z_{i}"] if new != mk else []

    if t is Target.C:
        c = _substitute(mode, bulletin.c, q, rng, None)
        if mode is not Mode.IDENTITY and c == 0:
            c = (c + 1) % q if (c + 1) % q != bulletin.c else (c + 2) % q
        return replace(bulletin, c=c), ["c"] if c != bulletin.c else []

    if t is Target.TAIL:
        tail = list(bulletin.tail)
        pos, val = tail[i - 1]
        swap = tail[spec.other - 1][1] if mode is Mode.SWAP else None
        tail[i - 1] = (pos, _substitute(mode, val, q, rng, swap))
        changed = [f"tail_{pos}"] if tail[i - 1][1] != val else []
        return replace(bulletin, tail=tuple(tail)), changed

    honest = state.terms[i - 1]
    swap = state.terms[spec.other - 1] if mode is Mode.SWAP else None
    value = _substitute(mode, honest, q, rng, swap)
    if value == honest:
        return bulletin, []
    if t is Target.INIT:
        # Substitute before generation; the victim still receives the honest value.
        init = list(state.spec.init)
        init[i - 1] = value
        spec2: NlrSpec = replace(state.spec, init=tuple(init))
        last = max(len(state.terms) - 1, max((mk.position for mk in bulletin.masks), default=0))
        terms = generate(spec2, last).terms
        commitments = _commitments_from(params, bulletin, state.b, terms,
                                         {i: bulletin.commitment(i).E})
        secrets = {slot: s for slot, _, s in state.secrets}
        masks = tuple(Mask(mk.slot, mk.position, (secrets[mk.slot] - terms[mk.position]) % q)
                      for mk in bulletin.masks)
        tail = tuple((pos, terms[pos]) for pos, _ in bulletin.tail)
        return replace(bulletin, commitments=commitments, masks=masks, tail=tail), [f"u_{i - 1}"]
    # Mask-range substitution: publish a matching E/T pair for the fake value.
    terms = list(state.terms)
    terms[i - 1] = value
    commitments = _commitments_from(params, bulletin, state.b, terms,
                                     {c.index: c.E for c in bulletin.commitments if c.index != i})
    return replace(bulletin, commitments=commitments), [f"u_{i - 1}"]


def is_covered(bulletin: Bulletin, spec: TamperSpec, q: int) -> bool:
    """Whether some computable check reads the tampered item."""
    t, i = spec.target, spec.index
    if t in (Target.E, Target.T, Target.INIT):
        return bulletin.registry.at(i) is not None
    instances = consistency_instances(bulletin)
    if t is Target.MASK:
        return any(n + 1 <= i <= n + 1 + bulletin.k for n in instances)
    if t is Target.C:
        return any(n % q for n in instances)
    return False


def run_dealer_attack(params: XtrParams, config: SchemeConfig, scenario: TamperSpec,
                      rng: random.Random, session: Session | None = None) -> ScenarioReport:
    """Honest deal, one tamper, then every participant-side check."""
    if session is None:
        session = build_session(params, config, rng)
    report = ScenarioReport(scenario.name)
    try:
        bulletin, changed = tamper_bulletin(session, scenario, rng)
    except ParameterError as exc:
        report.details["error"] = str(exc)
        return report
    report.tampered = changed
    report.covered = bool(changed) and is_covered(bulletin, scenario, params.q)
    participant_checks(params, bulletin, session.keys, report)
    return report


def coverage_scenarios(config: SchemeConfig) -> list[TamperSpec]:
    k, m, l = config.k, config.m, config.l
    specs = []
    for target in Target:
        for index in target_range(target, k, m, l):
            specs.append(TamperSpec(target, index, Mode.INCREMENT))
            specs.append(TamperSpec(target, index, Mode.RANDOMIZE))
            if target is not Target.C:
                partners = [o for o in _partner_range(target, k, m, l) if o != index]
                if partners:
                    specs.append(TamperSpec(target, index, Mode.SWAP, partners[0]))
        valid = target_range(target, k, m, l)
        if len(valid):
            specs.append(TamperSpec(target, valid[0], Mode.IDENTITY))
    return specs


def coverage_matrix(params: XtrParams, config: SchemeConfig = TOY_CONFIG,
                    seed: int = 0) -> list[ScenarioReport]:
    """Every tamper target × index × mode against one seeded honest deal."""
    session = build_session(params, config, random.Random(seed))
    return [run_dealer_attack(params, config, spec, random.Random(f"{seed}/{spec.name}"), session)
            for spec in coverage_scenarios(config)]


# -- participant cheating -----------------------------------------------------

PARTICIPANT_MODES = ("honest", "increment", "randomize", "relabel", "swap")


def run_participant_cheat(session: Session, index: int, mode: str, rng: random.Random,
                          way: Way = Way.INTERPOLATION) -> ScenarioReport:
    """Coalition recovery in which the participant at `index` misbehaves.

    relabel: the share claims a different index; swap: two members exchange
    identities (each submits its own term under the other's id).
    """
    if mode not in PARTICIPANT_MODES:
        raise ParameterError(f"unknown participant mode {mode!r}")
    params, bulletin = session.params, session.bulletin
    q, k = params.q, bulletin.k
    indices = [e.index for e in bulletin.registry]
    others = [j for j in indices if j != index]
    size = max(k, 2) if mode in ("relabel", "swap") else k
    if way is Way.CONSECUTIVE:
        pos = indices.index(index)
        start = max(0, min(pos, len(indices) - size))
        coalition = indices[start:start + size]
    else:
        coalition = [index] + rng.sample(others, size - 1)
    shares = {j: session.share_at(j) for j in coalition}
    report = ScenarioReport(f"participant[{index}]:{mode}:{way.value}")
    honest = shares[index]

    if mode in ("increment", "randomize"):
        u = _substitute(Mode(mode), honest.u, q, rng, None)
        shares[index] = replace(honest, u=u)
        report.tampered = [f"u@{honest.id}"]
    elif mode == "relabel":
        outside = [j for j in others if j not in coalition]
        target = rng.choice(outside or [j for j in coalition if j != index])
        shares[index] = replace(honest, index=target)
        report.tampered = [f"index@{honest.id}"]
    elif mode == "swap":
        partner = next(j for j in coalition if j != index)
        a, b = shares[index], shares[partner]
        shares[index] = replace(a, id=b.id)
        shares[partner] = replace(b, id=a.id)
        report.tampered = [f"id@{a.id}", f"id@{b.id}"]
    report.covered = bool(report.tampered)

    submitted = list(shares.values())
    report.checks_run = [f"share {s.id}@{s.index}" for s in submitted]
    try:
        recovered = recover(params, bulletin, submitted, way)
    except CheaterError as exc:
        report.cheaters = sorted(exc.ids)
        report.checks_failed = [f"share {i}: {exc.reasons[i]}" for i in report.cheaters]
        report.detecting_party = ["recovery coalition"]
        report.detected = True
        return report
    expected = {slot: s for slot, _, s in session.state.secrets
                if any(mk.slot == slot for mk in bulletin.masks)}
    report.secrets_correct = recovered == expected
    return report


# -- honest lifecycle ---------------------------------------------------------

def _expected_secrets(state: DealerState, bulletin: Bulletin) -> dict[int, int]:
    live = {mk.slot for mk in bulletin.masks}
    return {slot: s for slot, _, s in state.secrets if slot in live}


def _recovers(params, bulletin, shares, expected, way=Way.INTERPOLATION, method="lagrange") -> bool:
    try:
        return recover(params, bulletin, shares, way, method) == expected
    except VmssError:
        return False


def _raises_insufficient(params, bulletin, shares, way) -> bool:
    try:
        recover(params, bulletin, shares, way)
    except InsufficientSharesError:
        return True
    except VmssError:
        return False
    return False


def run_session(params: XtrParams, config: SchemeConfig, rng: random.Random) -> ScenarioReport:
    """Honest lifecycle with one of each dynamic operation, checking recovery after each."""
    report = ScenarioReport(f"session:scheme{int(config.scheme)}:k{config.k}:m{config.m}:l{config.l}")
    session = build_session(params, config, rng)
    bulletin, state, keys = session.bulletin, session.state, dict(session.keys)
    k, m, l = config.k, config.m, config.l

    def shares_for(b: Bulletin, idents) -> list[RecoveryShare]:
        out = []
        for ident in idents:
            entry = b.registry.find(ident)
            out.append(RecoveryShare(ident, entry.index,
                                     extract_subshadow(params, b, entry.index, keys[ident].x)))
        return out

    def count_ok(b: Bulletin, expected: int) -> bool:
        text = bulletin_to_text(b)
        return count_items(text) == b.count_public_items() == expected

    check = report.record
    verification = ScenarioReport("verify")
    participant_checks(params, bulletin, keys, verification)
    check("verify_all", not verification.detected)
    check("count_after_deal", count_ok(bulletin, expected_public_items(m, l)))

    ids = [e.id for e in bulletin.registry]
    expected = _expected_secrets(state, bulletin)
    coalition = shares_for(bulletin, rng.sample(ids, k))
    check("recover_interpolation", _recovers(params, bulletin, coalition, expected))
    check("lagrange_equals_gauss", _recovers(params, bulletin, coalition, expected, method="gauss"))
    check("recover_consecutive", _recovers(params, bulletin, shares_for(bulletin, ids[:k]),
                                           expected, Way.CONSECUTIVE))
    short = shares_for(bulletin, ids[:k - 1])
    check("insufficient_k_minus_1",
          _raises_insufficient(params, bulletin, short, Way.INTERPOLATION)
          and _raises_insufficient(params, bulletin, short, Way.CONSECUTIVE))

    new_secret = rng.randrange(1, params.q)
    bulletin, state = add_secret(bulletin, state, new_secret)
    expected = _expected_secrets(state, bulletin)
    check("add_secret_recover", _recovers(params, bulletin, shares_for(bulletin, ids[:k]), expected))
    check("count_after_add_secret", count_ok(bulletin, expected_public_items(m, l + 1)))

    removed_slot = 1
    removed_value = next(s for slot, _, s in state.secrets if slot == removed_slot)
    bulletin = remove_secret(bulletin, removed_slot)
    expected = _expected_secrets(state, bulletin)
    check("remove_secret_recover", _recovers(params, bulletin, shares_for(bulletin, ids[-k:]), expected))
    bulletin, state = add_secret(bulletin, state, removed_value)
    expected = _expected_secrets(state, bulletin)
    check("readd_secret_recover", _recovers(params, bulletin, shares_for(bulletin, ids[:k]), expected)
          and removed_value in expected.values())

    if m - 1 >= k:
        leaving = ids[0]
        leaving_share = shares_for(bulletin, [leaving])[0]
        bulletin = remove_participant(bulletin, leaving)
        remaining = [e.id for e in bulletin.registry]
        try:
            recover(params, bulletin, [leaving_share] + shares_for(bulletin, remaining[:k - 1]))
            named = False
        except CheaterError as exc:
            named = leaving in exc.ids
        check("removed_share_rejected", named)
        check("remaining_recover", _recovers(params, bulletin, shares_for(bulletin, remaining[:k]), expected))
        ids = remaining

    newcomer = f"P{m + 1}"
    try:
        for _ in range(32):
            kp = fresh_keypair(params, bulletin.registry, rng)
            try:
                position = state.next_position
                bulletin, state = add_participant(params, bulletin, state, newcomer, kp.y)
                break
            except BlindingDegenerateError:
                continue
        else:
            raise GenerationError("every fresh key was degenerate for this deal")
        keys[newcomer] = kp
        entry = bulletin.registry.find(newcomer)
        check("add_participant_index", entry.index == position + 1)
        u_new = extract_subshadow(params, bulletin, entry.index, kp.x)
        check("add_participant_verify", verify_own(params, bulletin, entry.index, u_new))
        check("add_participant_recover",
              _recovers(params, bulletin, shares_for(bulletin, [newcomer] + ids[:k - 1]), expected))
    except (GenerationError, ShadowCollisionError) as exc:
        report.details["add_participant"] = str(exc)
        check("add_participant_recover", False)

    # Threshold change re-deals the current registry and live secrets.
    new_k = k + 1 if k + 1 <= len(bulletin.registry) and _k_fits(k + 1, params.q) else k
    live = [expected[slot] for slot in sorted(expected)]
    old_shares = shares_for(bulletin, [e.id for e in bulletin.registry])
    bulletin2, state2 = change_threshold(params, config, bulletin.registry, live, new_k, rng)
    expected2 = _expected_secrets(state2, bulletin2)
    ids2 = [e.id for e in bulletin2.registry]
    check("change_threshold_recover",
          _recovers(params, bulletin2, shares_for(bulletin2, ids2[:new_k]), expected2)
          and sorted(expected2.values()) == sorted(live))
    check("change_threshold_insufficient",
          _raises_insufficient(params, bulletin2, shares_for(bulletin2, ids2[:new_k - 1]),
                               Way.INTERPOLATION))
    still_valid = sum(verify_own(params, bulletin2, bulletin2.registry.find(s.id).index, s.u)
                      for s in old_shares)
    report.details["new_k"] = new_k
    report.details["old_subshadows_still_valid"] = still_valid
    report.details["old_subshadows_total"] = len(old_shares)
    report.secrets_correct = not report.detected
    return report


def _k_fits(k: int, q: int) -> bool:
    return all(q > math.comb(k, j) for j in range(k + 1))


# -- information-level analysis -----------------------------------------------

def threshold_candidates(bulletin: Bulletin, shares: Sequence[RecoveryShare]) -> dict[int, list[int]]:
    """For each live secret, the values consistent with k-1 shares plus the tail.

    Works at the closed-form level (polynomials of degree ≤ k + 1), exhaustively
    over GF(q).
    """
    q, k = bulletin.params.q, bulletin.k
    if len(shares) != k - 1:
        raise ParameterError(f"expected exactly k-1={k - 1} shares")
    points = [(s.index - 1, s.u) for s in shares] + list(bulletin.tail)
    out = {}
    for mk in bulletin.masks:
        values = completions(bulletin.variant, points, k, q, mk.position)
        out[mk.slot] = sorted({(mk.z + v) % q for v in values})
    return out


def public_candidates(bulletin: Bulletin) -> dict[int, list[int]]:
    """Secrets consistent with the bulletin alone, by brute force over every
    initial window in GF(q)^k.  Feasible only for tiny q and k."""
    q, k, variant = bulletin.params.q, bulletin.k, bulletin.variant
    if q ** k > 1 << 22:
        raise ParameterError("search space too large for exhaustive analysis")
    last = max([pos for pos, _ in bulletin.tail] + [mk.position for mk in bulletin.masks])
    out: dict[int, set[int]] = {mk.slot: set() for mk in bulletin.masks}
    for init in itertools.product(range(q), repeat=k):
        spec = NlrSpec(variant, k, bulletin.c, init, q)
        terms = generate(spec, last).terms
        if all(terms[pos] == val for pos, val in bulletin.tail):
            for mk in bulletin.masks:
                out[mk.slot].add((mk.z + terms[mk.position]) % q)
    return {slot: sorted(vals) for slot, vals in out.items()}

