"""Line-oriented text formats: bulletin, registry, dealer state, key and share files.

Every format is ``key=value`` lines with decimal integers; GF(p²) values are
``z1,z2`` and GF(p⁶) values six comma-separated coordinates.  Output is
byte-reproducible for identical inputs.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .errors import MalformedBulletinError, ParameterError
from .gf import Gfp2
from .nlr import NlrSpec, Variant, generate
from .vmss import (
    Bulletin,
    Commitment,
    DealerState,
    Mask,
    RecoveryShare,
    Registry,
    RegistryEntry,
    Scheme,
)
from .xtr import XtrKeypair, params_from_fields, parse_key_values

BULLETIN_MAGIC = "# xtrvmss bulletin v1"
STATE_MAGIC = "# xtrvmss dealer state v1 (private)"

# Keys that count as one public item each in the integrity line.
COUNTED_KEYS = ("lambda", "p", "q", "g", "trace_g", "trace_gb",
                "participant", "E", "T", "z", "c", "tail")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory and rename over the target."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- registry ---------------------------------------------------------------

def registry_lines(registry: Registry) -> list[str]:
    return [f"participant={e.index};{e.id};{e.y.to_str()}" for e in registry]


def parse_registry_line(value: str, p: int) -> RegistryEntry:
    parts = value.split(";")
    if len(parts) != 3:
        raise ParameterError(f"malformed participant record {value!r}")
    return RegistryEntry(parts[1], Gfp2.parse(parts[2], p), int(parts[0]))


def registry_to_text(registry: Registry) -> str:
    return "\n".join(["# xtrvmss registry v1", *registry_lines(registry)]) + "\n"


def registry_from_text(text: str, p: int) -> Registry:
    registry = Registry()
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        if key != "participant":
            raise ParameterError(f"unexpected registry line {raw!r}")
        entry = parse_registry_line(value, p)
        registry = registry.add(entry.id, entry.y, entry.index)
    return registry


# -- bulletin ---------------------------------------------------------------

def bulletin_to_text(bulletin: Bulletin) -> str:
    params = bulletin.params
    lines = [
        BULLETIN_MAGIC,
        "[params]",
        f"lambda={params.lam}",
        f"p={params.p}",
        f"q={params.q}",
        f"g={params.g.to_str()}",
        f"trace_g={params.c.to_str()}",
        f"trace_gb={bulletin.header.to_str()}",
        "[registry]",
        *registry_lines(bulletin.registry),
        "[construction]",
        f"scheme={int(bulletin.scheme)}",
        f"k={bulletin.k}",
    ]
    lines += [f"E={cm.index};{cm.E}" for cm in bulletin.commitments]
    lines += [f"T={cm.index};{cm.T.to_str()}" for cm in bulletin.commitments]
    lines += [f"z={mk.slot};{mk.position};{mk.z}" for mk in bulletin.masks]
    lines.append(f"c={bulletin.c}")
    lines += [f"tail={pos};{val}" for pos, val in bulletin.tail]
    counted = sum(1 for ln in lines if ln.partition("=")[0] in COUNTED_KEYS)
    lines += ["[integrity]", f"items={counted}"]
    return "\n".join(lines) + "\n"


def count_items(text: str) -> int:
    return sum(1 for ln in text.splitlines() if ln.partition("=")[0] in COUNTED_KEYS)


def bulletin_from_text(text: str) -> Bulletin:
    lines = text.splitlines()
    if not lines or lines[0] != BULLETIN_MAGIC:
        raise MalformedBulletinError("missing bulletin header line")
    single: dict[str, str] = {}
    multi: dict[str, list[str]] = {k: [] for k in ("participant", "E", "T", "z", "tail")}
    declared = None
    for raw in lines[1:]:
        if not raw or raw.startswith("[") or raw.startswith("#"):
            continue
        key, sep, value = raw.partition("=")
        if not sep:
            raise MalformedBulletinError(f"malformed line {raw!r}")
        if key == "items":
            declared = int(value)
        elif key in multi:
            multi[key].append(value)
        elif key in single:
            raise MalformedBulletinError(f"duplicate key {key!r}")
        else:
            single[key] = value
    if declared is None or declared != count_items(text):
        raise MalformedBulletinError(f"integrity count {declared} does not match {count_items(text)} items")

    try:
        p = int(single["p"])
        c = Gfp2.parse(single["trace_g"], p)
        params = params_from_fields({
            "lambda": single["lambda"], "p": single["p"], "q": single["q"],
            "c.z1": str(c.z1), "c.z2": str(c.z2), "g": single["g"],
        })
        field = params.field
        registry = Registry()
        for value in multi["participant"]:
            e = parse_registry_line(value, p)
            registry = registry.add(e.id, e.y, e.index)
        E = {}
        for value in multi["E"]:
            idx, body = value.split(";")
            E[int(idx)] = int(body)
        T = {}
        for value in multi["T"]:
            idx, coords = value.split(";")
            T[int(idx)] = field.parse(coords)
        if E.keys() != T.keys():
            raise MalformedBulletinError("E and T lists cover different indices")
        commitments = tuple(Commitment(i, E[i], T[i]) for i in sorted(E))
        masks = []
        for value in multi["z"]:
            slot, pos, z = (int(v) for v in value.split(";"))
            masks.append(Mask(slot, pos, z))
        tail = tuple(tuple(int(v) for v in value.split(";")) for value in multi["tail"])
        return Bulletin(params, Scheme(int(single["scheme"])), int(single["k"]),
                        Gfp2.parse(single["trace_gb"], p), registry, commitments,
                        tuple(masks), int(single["c"]), tail)
    except (KeyError, ValueError) as exc:
        raise MalformedBulletinError(f"bad bulletin field: {exc}") from None


# -- dealer state -----------------------------------------------------------

def state_to_text(state: DealerState) -> str:
    spec = state.spec
    lines = [
        STATE_MAGIC,
        f"variant={spec.variant.value}",
        f"k={spec.k}",
        f"q={spec.q}",
        f"c={spec.c}",
        "init=" + ",".join(str(v) for v in spec.init),
        f"b={state.b}",
        f"next_position={state.next_position}",
        f"next_slot={state.next_slot}",
    ]
    lines += [f"secret={slot};{pos};{s}" for slot, pos, s in state.secrets]
    return "\n".join(lines) + "\n"


def state_from_text(text: str) -> DealerState:
    fields: dict[str, str] = {}
    secrets = []
    for raw in text.splitlines():
        if not raw or raw.startswith("#"):
            continue
        key, _, value = raw.partition("=")
        if key == "secret":
            secrets.append(tuple(int(v) for v in value.split(";")))
        else:
            fields[key] = value
    spec = NlrSpec(Variant(int(fields["variant"])), int(fields["k"]), int(fields["c"]),
                   tuple(int(v) for v in fields["init"].split(",")), int(fields["q"]))
    next_position = int(fields["next_position"])
    terms = generate(spec, max(next_position - 1, spec.k - 1)).terms
    return DealerState(int(fields["b"]), spec, terms, tuple(secrets), next_position,
                       int(fields["next_slot"]))


# -- keys and shares --------------------------------------------------------

def key_to_text(ident: str, keypair: XtrKeypair) -> str:
    return f"# xtrvmss private key (keep secret)\nid={ident}\nx={keypair.x}\ny={keypair.y.to_str()}\n"


def key_from_text(text: str, p: int) -> tuple[str, XtrKeypair]:
    fields = parse_key_values(text)
    return fields["id"], XtrKeypair(int(fields["x"]), Gfp2.parse(fields["y"], p))


def share_to_text(share: RecoveryShare) -> str:
    return f"# xtrvmss recovery share\nid={share.id}\nindex={share.index}\nu={share.u}\n"


def share_from_text(text: str) -> RecoveryShare:
    fields = parse_key_values(text)
    return RecoveryShare(fields["id"], int(fields["index"]), int(fields["u"]))

