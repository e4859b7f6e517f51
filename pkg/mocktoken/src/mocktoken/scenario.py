"""Scenario files describe the initial contents of a mock token.

Line-oriented format, ``#`` comments and blank lines ignored:

    mode simple|pkcs11|yubihsm
    session caps=<names> delcaps=<names>            (yubihsm only)
    key id=N seed=S [type=T] [attrs=<names>] [caps=<names>]
        [delcaps=<names>] [flags=<names>]
    known id=N seed=S

Key material is derived deterministically: value = SHA-256(seed).
``known`` entries (and keys flagged ``known``) model values the attacker
holds outside the token.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

PKCS11_ATTRS = ("sensitive", "extractable", "wrap", "unwrap", "encrypt", "decrypt")
YUBIHSM_CAPS = ("export-wrapped", "import-wrapped", "exportable-under-wrap",
                "put-wrap-key")
SIMPLE_FLAGS = ("exportable", "sensitive")
MODES = ("simple", "pkcs11", "yubihsm")


class ScenarioError(Exception):
    pass


def key_value(seed: str) -> bytes:
    return hashlib.sha256(seed.encode()).digest()


def _bools(raw: str, universe: tuple[str, ...], where: str) -> tuple[bool, ...]:
    names = [n for n in raw.split(",") if n]
    for n in names:
        if n not in universe:
            raise ScenarioError(f"{where}: unknown name {n!r} "
                                f"(expected one of {', '.join(universe)})")
    return tuple(u in names for u in universe)


@dataclass(frozen=True)
class KeyEntry:
    id: int
    seed: str
    type: str = "data"
    attrs: tuple[bool, ...] = (False,) * len(PKCS11_ATTRS)
    caps: tuple[bool, ...] = (False,) * len(YUBIHSM_CAPS)
    delcaps: tuple[bool, ...] = (False,) * len(YUBIHSM_CAPS)
    exportable: bool = False
    sensitive: bool = False
    known: bool = False

    @property
    def value(self) -> bytes:
        return key_value(self.seed)


@dataclass(frozen=True)
class Scenario:
    mode: str
    keys: tuple[KeyEntry, ...]
    known_values: dict[int, bytes] = field(default_factory=dict)
    session_caps: tuple[bool, ...] = (False,) * len(YUBIHSM_CAPS)
    session_delcaps: tuple[bool, ...] = (False,) * len(YUBIHSM_CAPS)

    def key(self, key_id: int) -> KeyEntry:
        for k in self.keys:
            if k.id == key_id:
                return k
        raise ScenarioError(f"no key with id {key_id}")

    def sensitive_values(self) -> dict[int, bytes]:
        out = {}
        for k in self.keys:
            if k.sensitive or (self.mode == "pkcs11" and k.attrs[0]):
                out[k.id] = k.value
        return out


def _fields(parts: list[str], line_no: int) -> dict[str, str]:
    out = {}
    for part in parts:
        if "=" not in part:
            raise ScenarioError(f"line {line_no}: expected name=value, got {part!r}")
        name, _, value = part.partition("=")
        if name in out:
            raise ScenarioError(f"line {line_no}: duplicate field {name!r}")
        out[name] = value
    return out


def parse_scenario(text: str) -> Scenario:
    mode: str | None = None
    keys: list[KeyEntry] = []
    known: dict[int, bytes] = {}
    session_caps = (False,) * len(YUBIHSM_CAPS)
    session_delcaps = (False,) * len(YUBIHSM_CAPS)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *parts = line.split()
        where = f"line {line_no}"
        if head == "mode":
            if len(parts) != 1 or parts[0] not in MODES:
                raise ScenarioError(f"{where}: mode must be one of {', '.join(MODES)}")
            mode = parts[0]
        elif head == "session":
            fields = _fields(parts, line_no)
            session_caps = _bools(fields.pop("caps", ""), YUBIHSM_CAPS, where)
            session_delcaps = _bools(fields.pop("delcaps", ""), YUBIHSM_CAPS, where)
            if fields:
                raise ScenarioError(f"{where}: unexpected fields {sorted(fields)}")
        elif head == "key":
            fields = _fields(parts, line_no)
            try:
                key_id = int(fields.pop("id"))
                seed = fields.pop("seed")
            except KeyError as exc:
                raise ScenarioError(f"{where}: key needs {exc.args[0]}") from None
            flags = [f for f in fields.pop("flags", "").split(",") if f]
            for f in flags:
                if f not in SIMPLE_FLAGS + ("known",):
                    raise ScenarioError(f"{where}: unknown flag {f!r}")
            entry = KeyEntry(
                id=key_id,
                seed=seed,
                type=fields.pop("type", "data"),
                attrs=_bools(fields.pop("attrs", ""), PKCS11_ATTRS, where),
                caps=_bools(fields.pop("caps", ""), YUBIHSM_CAPS, where),
                delcaps=_bools(fields.pop("delcaps", ""), YUBIHSM_CAPS, where),
                exportable="exportable" in flags,
                sensitive="sensitive" in flags,
                known="known" in flags,
            )
            if fields:
                raise ScenarioError(f"{where}: unexpected fields {sorted(fields)}")
            if any(k.id == key_id for k in keys):
                raise ScenarioError(f"{where}: duplicate key id {key_id}")
            keys.append(entry)
            if entry.known:
                known[key_id] = entry.value
        elif head == "known":
            fields = _fields(parts, line_no)
            try:
                known[int(fields["id"])] = key_value(fields["seed"])
            except KeyError as exc:
                raise ScenarioError(f"{where}: known needs {exc.args[0]}") from None
        else:
            raise ScenarioError(f"{where}: unknown directive {head!r}")
    if mode is None:
        raise ScenarioError("scenario has no mode line")
    return Scenario(mode=mode, keys=tuple(keys), known_values=known,
                    session_caps=session_caps, session_delcaps=session_delcaps)


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
