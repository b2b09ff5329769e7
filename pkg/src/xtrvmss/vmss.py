"""Dealer/participant protocol for the two verifiable (k, l, m) multi-secret schemes.

Sequence bookkeeping: participant index i holds the term u_{i-1}, secret
slot j is masked with the term at its recorded position (m + j - 1 for a
fresh deal), and the two terms after the masks are published as the tail.
Positions handed out by the dynamic operations are always fresh, i.e.
beyond every position already assigned or published.
"""

from __future__ import annotations

import enum
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace

from .errors import (
    BlindingDegenerateError,
    CheaterError,
    DomainError,
    IdentityError,
    InsufficientSharesError,
    MalformedBulletinError,
    ParameterError,
    ShadowCollisionError,
)
from .gf import Gfp2, Gfp6
from .nlr import (
    NlrSpec,
    Variant,
    check_modulus,
    coefficients,
    eval_closed_form,
    extend_consecutive,
    generate,
    recover_polynomial,
    rhs,
)
from .xtr import (
    ScalarCiphertext,
    XtrParams,
    blinding_factor,
    decrypt_scalar,
    subgroup_check,
    trace_ladder,
)

BLINDING_RETRIES = 64


class Scheme(enum.IntEnum):
    SCHEME1 = 1
    SCHEME2 = 2

    @property
    def variant(self) -> Variant:
        return Variant.NLR1 if self is Scheme.SCHEME1 else Variant.NLR2


class Way(enum.Enum):
    INTERPOLATION = "lagrange"
    CONSECUTIVE = "consecutive"


@dataclass(frozen=True)
class SchemeConfig:
    scheme: Scheme
    k: int
    m: int
    l: int

    def __post_init__(self):
        if not 1 <= self.k <= self.m:
            raise ParameterError(f"need 1 <= k <= m, got k={self.k}, m={self.m}")
        if self.l < 1:
            raise ParameterError(f"need at least one secret, got l={self.l}")


def check_id(ident: str) -> None:
    if not ident or ident != ident.strip() or any(ch in ident for ch in ";=\n\r"):
        raise ParameterError(f"invalid participant id {ident!r}")


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    y: Gfp2
    index: int


@dataclass(frozen=True)
class Registry:
    entries: tuple[RegistryEntry, ...] = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def find(self, ident: str) -> RegistryEntry | None:
        return next((e for e in self.entries if e.id == ident), None)

    def at(self, index: int) -> RegistryEntry | None:
        return next((e for e in self.entries if e.index == index), None)

    def next_index(self) -> int:
        return max((e.index for e in self.entries), default=0) + 1

    def add(self, ident: str, y: Gfp2, index: int | None = None) -> Registry:
        check_id(ident)
        if self.find(ident) is not None:
            raise IdentityError(f"id {ident!r} already registered")
        if any(e.y == y for e in self.entries):
            raise ShadowCollisionError(f"public shadow of {ident!r} collides; pick a new key")
        index = self.next_index() if index is None else index
        if self.at(index) is not None:
            raise ParameterError(f"index {index} already taken")
        return Registry(self.entries + (RegistryEntry(ident, y, index),))

    def remove(self, ident: str) -> Registry:
        if self.find(ident) is None:
            raise IdentityError(f"id {ident!r} is not registered")
        return Registry(tuple(e for e in self.entries if e.id != ident))

    def reindexed(self) -> Registry:
        return Registry(tuple(replace(e, index=i) for i, e in enumerate(self.entries, 1)))


def register(params: XtrParams, registry: Registry, ident: str, y: Gfp2) -> Registry:
    if y.p != params.p:
        raise ParameterError("public shadow built over a different p")
    return registry.add(ident, y)


@dataclass(frozen=True)
class Commitment:
    index: int
    E: int
    T: Gfp6


@dataclass(frozen=True)
class Mask:
    slot: int
    position: int
    z: int


@dataclass(frozen=True)
class Bulletin:
    params: XtrParams
    scheme: Scheme
    k: int
    header: Gfp2
    registry: Registry
    commitments: tuple[Commitment, ...]
    masks: tuple[Mask, ...]
    c: int
    tail: tuple[tuple[int, int], ...]

    def commitment(self, index: int) -> Commitment | None:
        return next((cm for cm in self.commitments if cm.index == index), None)

    @property
    def variant(self) -> Variant:
        return self.scheme.variant

    def count_public_items(self) -> int:
        # λ, p, q, g, Tr(g), Tr(g^b); one per (ID, y) pair; E, T per commitment;
        # z per live secret; c; the two tail terms
        return 6 + len(self.registry) + 2 * len(self.commitments) + len(self.masks) + 1 + len(self.tail)


def expected_public_items(m: int, l: int) -> int:
    return 3 * m + l + 9


@dataclass(frozen=True)
class DealerState:
    """Private dealer memory; never written into a bulletin."""

    b: int
    spec: NlrSpec
    terms: tuple[int, ...]
    secrets: tuple[tuple[int, int, int], ...]  # (slot, position, S)
    next_position: int
    next_slot: int

    def with_terms_upto(self, position: int) -> DealerState:
        if position < len(self.terms):
            return self
        return replace(self, terms=generate(self.spec, position).terms)


@dataclass(frozen=True)
class RecoveryShare:
    id: str
    index: int
    u: int


# -- construction -------------------------------------------------------------

def _check_secret(params: XtrParams, s: int) -> int:
    if not 0 < s < params.q:
        raise DomainError(f"secret {s} is not in GF(q)* for q={params.q}")
    return s


def _draw_blinding(params: XtrParams, entries: Sequence[RegistryEntry], rng: random.Random):
    q = params.q
    for _ in range(BLINDING_RETRIES):
        b = rng.randrange(2, q - 2)
        kappas = [blinding_factor(e.y, b, q) for e in entries]
        if all(kappas):
            return b, kappas
    raise BlindingDegenerateError(f"no usable blinding exponent in {BLINDING_RETRIES} draws")


def _commit(params: XtrParams, kappa: int, index: int, u: int) -> Commitment:
    return Commitment(index, kappa * u % params.q, params.g_pow(u))


def deal(params: XtrParams, config: SchemeConfig, registry: Registry, secrets: Sequence[int],
         rng: random.Random) -> tuple[Bulletin, DealerState]:
    """Run the construction phase and return the public bulletin plus dealer memory."""
    q, k, m, l = params.q, config.k, config.m, config.l
    if len(registry) != m:
        raise ParameterError(f"registry holds {len(registry)} participants, expected m={m}")
    if len(secrets) != l:
        raise ParameterError(f"expected l={l} secrets, got {len(secrets)}")
    check_modulus(k, q)
    secrets = [_check_secret(params, s) for s in secrets]
    registry = registry.reindexed()

    spec = NlrSpec(config.scheme.variant, k, rng.randrange(1, q),
                   tuple(rng.randrange(1, q) for _ in range(k)), q)
    terms = generate(spec, m + l + 1).terms
    b, kappas = _draw_blinding(params, registry.entries, rng)

    commitments = tuple(_commit(params, kappa, e.index, terms[e.index - 1])
                        for e, kappa in zip(registry.entries, kappas))
    masks = tuple(Mask(j, m + j - 1, (s - terms[m + j - 1]) % q) for j, s in enumerate(secrets, 1))
    tail = ((m + l, terms[m + l]), (m + l + 1, terms[m + l + 1]))
    bulletin = Bulletin(params, config.scheme, k, trace_ladder(params.c, b), registry,
                        commitments, masks, spec.c, tail)
    state = DealerState(b, spec, terms, tuple((j, m + j - 1, s) for j, s in enumerate(secrets, 1)),
                        m + l + 2, l + 1)
    return bulletin, state


# -- verification -------------------------------------------------------------

def extract_subshadow(params: XtrParams, bulletin: Bulletin, index: int, x: int) -> int:
    cm = bulletin.commitment(index)
    if cm is None:
        raise ParameterError(f"no commitment for participant index {index}")
    return decrypt_scalar(params, ScalarCiphertext(bulletin.header, cm.E), x)


def verify_own(params: XtrParams, bulletin: Bulletin, index: int, u: int) -> bool:
    cm = bulletin.commitment(index)
    if cm is None or not 0 <= u < params.q:
        return False
    return params.g_pow(u) == cm.T


def check_subgroup(params: XtrParams, bulletin: Bulletin) -> None:
    for cm in bulletin.commitments:
        if cm.T.field != params.field or not subgroup_check(params, cm.T):
            raise MalformedBulletinError(f"T_{cm.index} is not in the order-q subgroup", cm.index)


def consistency_instances(bulletin: Bulletin) -> list[int]:
    """Instances i whose check needs T_{i+1}..T_{i+1+k}, all of which are published."""
    present = {cm.index for cm in bulletin.commitments}
    top = max(present, default=0)
    k = bulletin.k
    return [i for i in range(max(top - k, 0))
            if all(i + 1 + t in present for t in range(k + 1))]


def verify_consistency(params: XtrParams, bulletin: Bulletin) -> list[tuple[int, bool]]:
    """Check Π_j T_{i+1+k-j}^(a_j) = g^(rhs_i) for every computable instance i."""
    check_subgroup(params, bulletin)
    q, k = params.q, bulletin.k
    weights = coefficients(bulletin.variant, k, q)
    T = {cm.index: cm.T for cm in bulletin.commitments}
    out = []
    for i in consistency_instances(bulletin):
        lhs = params.field.one()
        for j, w in enumerate(weights):
            lhs = lhs * T[i + 1 + k - j] ** w
        out.append((i, lhs == params.g_pow(rhs(bulletin.variant, bulletin.c, i, q))))
    return out


# -- recovery -----------------------------------------------------------------

def cross_verify(params: XtrParams, bulletin: Bulletin, shares: Iterable[RecoveryShare]) -> None:
    """Reject shares whose id is not registered at the claimed index or whose u misses T."""
    reasons = {}
    for s in shares:
        entry = bulletin.registry.find(s.id)
        if entry is None:
            reasons[s.id] = "not registered"
        elif entry.index != s.index:
            reasons[s.id] = f"registered at index {entry.index}, claimed {s.index}"
        elif not verify_own(params, bulletin, s.index, s.u):
            reasons[s.id] = f"g^u does not match T_{s.index}"
    if reasons:
        raise CheaterError(list(reasons), reasons)


def _consecutive_run(shares: Sequence[RecoveryShare], k: int) -> list[RecoveryShare] | None:
    ordered = sorted(shares, key=lambda s: s.index)
    for start in range(len(ordered) - k + 1):
        run = ordered[start:start + k]
        if all(run[t + 1].index == run[t].index + 1 for t in range(k - 1)):
            return run
    return None


def recover(params: XtrParams, bulletin: Bulletin, shares: Sequence[RecoveryShare],
            way: Way | str = Way.INTERPOLATION, method: str = "lagrange") -> dict[int, int]:
    """Reconstruct every live secret, keyed by slot."""
    way = Way(way)
    shares = list(shares)
    cross_verify(params, bulletin, shares)
    if len({s.id for s in shares}) != len(shares) or len({s.index for s in shares}) != len(shares):
        raise ParameterError("duplicate participant in share set")
    q, k, variant = params.q, bulletin.k, bulletin.variant

    if way is Way.INTERPOLATION:
        if len(shares) < k:
            raise InsufficientSharesError(f"need {k} shares, got {len(shares)}")
        # x coordinates must stay distinct mod q, which matters once fresh
        # positions handed out by dynamic operations pass q
        used = {pos % q for pos, _ in bulletin.tail}
        chosen = []
        for s in sorted(shares, key=lambda s: s.index):
            if len(chosen) < k and (s.index - 1) % q not in used:
                used.add((s.index - 1) % q)
                chosen.append(s)
        if len(chosen) < k:
            raise InsufficientSharesError(f"need {k} shares at positions distinct mod q")
        points = [(s.index - 1, s.u) for s in chosen] + list(bulletin.tail)
        poly = recover_polynomial(variant, points, k, q, method)
        values = {mk.position: eval_closed_form(variant, poly, mk.position, q) for mk in bulletin.masks}
    else:
        run = _consecutive_run(shares, k)
        if run is None:
            raise InsufficientSharesError(f"need {k} shares with consecutive indices")
        start = run[0].index - 1
        if any(mk.position < start for mk in bulletin.masks):
            raise ParameterError("consecutive window starts after a masked position")
        upto = max((mk.position for mk in bulletin.masks), default=start)
        terms = extend_consecutive(variant, [s.u for s in run], start, bulletin.c, k, q, upto)
        values = {mk.position: terms[mk.position - start] for mk in bulletin.masks}

    return {mk.slot: (mk.z + values[mk.position]) % q for mk in bulletin.masks}


# -- dynamic operations -------------------------------------------------------

def add_participant(params: XtrParams, bulletin: Bulletin, state: DealerState, ident: str,
                    y: Gfp2) -> tuple[Bulletin, DealerState]:
    """Give a newcomer the next fresh sequence position; nothing published changes."""
    position = state.next_position
    registry = bulletin.registry.add(ident, y, index=position + 1)
    kappa = blinding_factor(y, state.b, params.q)
    if kappa == 0:
        raise BlindingDegenerateError(f"key of {ident!r} is degenerate for this deal; regenerate it")
    state = state.with_terms_upto(position)
    cm = _commit(params, kappa, position + 1, state.terms[position])
    bulletin = replace(bulletin, registry=registry, commitments=bulletin.commitments + (cm,))
    return bulletin, replace(state, next_position=position + 1)


def remove_participant(bulletin: Bulletin, ident: str) -> Bulletin:
    return replace(bulletin, registry=bulletin.registry.remove(ident))


def add_secret(bulletin: Bulletin, state: DealerState, secret: int) -> tuple[Bulletin, DealerState]:
    if not 0 < secret < bulletin.params.q:
        raise DomainError(f"secret {secret} is not in GF(q)*")
    position, slot = state.next_position, state.next_slot
    state = state.with_terms_upto(position)
    mask = Mask(slot, position, (secret - state.terms[position]) % bulletin.params.q)
    state = replace(state, secrets=state.secrets + ((slot, position, secret),),
                    next_position=position + 1, next_slot=slot + 1)
    return replace(bulletin, masks=bulletin.masks + (mask,)), state


def remove_secret(bulletin: Bulletin, slot: int) -> Bulletin:
    if all(mk.slot != slot for mk in bulletin.masks):
        raise ParameterError(f"no live secret in slot {slot}")
    return replace(bulletin, masks=tuple(mk for mk in bulletin.masks if mk.slot != slot))


def change_threshold(params: XtrParams, config: SchemeConfig, registry: Registry,
                     secrets: Sequence[int], new_k: int,
                     rng: random.Random) -> tuple[Bulletin, DealerState]:
    """Re-deal the same secrets to the same registry under a fresh order-new_k recursion."""
    new_config = replace(config, k=new_k, m=len(registry), l=len(secrets))
    return deal(params, new_config, registry, secrets, rng)
