"""In-memory mock token with three API personalities.

``simple``  : named keys with exportable/sensitive flags, wrap under a
              dedicated wrap-key type.
``pkcs11``  : per-object attribute vectors (sensitive, extractable, wrap,
              unwrap, encrypt, decrypt). Wrapping reuses the data-encryption
              channel, so a wrapped key decrypts like ordinary ciphertext.
``yubihsm`` : per-object and per-session capability vectors (export-wrapped,
              import-wrapped, exportable-under-wrap, put-wrap-key) with
              delegated capabilities bounding what an import may carry.

All secret material is derived from scenario seeds; blobs are AES-GCM with
a deterministic nonce so identical operations produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .scenario import PKCS11_ATTRS, Scenario, YUBIHSM_CAPS

NO_ATTRS = (False,) * len(PKCS11_ATTRS)
NO_CAPS = (False,) * len(YUBIHSM_CAPS)

AAD_WRAP = b"wrap"
AAD_DATA = b"data"

FRESH_ID_BASE = 1000


class TokenError(Exception):
    pass


def _seal(key: bytes, payload: bytes, aad: bytes) -> bytes:
    # nonce derived from the inputs: deterministic, unique per (key, payload, aad)
    nonce = hashlib.sha256(b"nonce" + key + aad + payload).digest()[:12]
    return nonce + AESGCM(key).encrypt(nonce, payload, aad)


def _open(key: bytes, blob: bytes, aad: bytes) -> bytes:
    if len(blob) < 13:
        raise TokenError("blob too short")
    try:
        return AESGCM(key).decrypt(blob[:12], blob[12:], aad)
    except InvalidTag:
        raise TokenError("blob does not open under this key") from None


def _is_bools(value: object, n: int) -> bool:
    return (isinstance(value, tuple) and len(value) == n
            and all(isinstance(b, bool) for b in value))


def _subset(inner: tuple[bool, ...], outer: tuple[bool, ...]) -> bool:
    return all(not a or b for a, b in zip(inner, outer))


@dataclass(frozen=True)
class StoredObject:
    id: int
    value: bytes
    type: str = "data"
    attrs: tuple[bool, ...] = NO_ATTRS
    caps: tuple[bool, ...] = NO_CAPS
    delcaps: tuple[bool, ...] = NO_CAPS
    exportable: bool = False

    def wrap_payload(self) -> bytes:
        return json.dumps({
            "id": self.id,
            "value": self.value.hex(),
            "type": self.type,
            "caps": list(self.caps),
            "delcaps": list(self.delcaps),
            "exportable": self.exportable,
        }, sort_keys=True).encode()


def payload_object(payload: bytes) -> StoredObject:
    try:
        d = json.loads(payload)
        return StoredObject(
            id=int(d["id"]),
            value=bytes.fromhex(d["value"]),
            type=str(d["type"]),
            caps=tuple(bool(b) for b in d["caps"]),
            delcaps=tuple(bool(b) for b in d["delcaps"]),
            exportable=bool(d.get("exportable", False)),
        )
    except (ValueError, KeyError, TypeError):
        raise TokenError("blob payload is not a key object") from None


class Token:
    """Mutable token state for one scenario."""

    def __init__(self, scenario: Scenario) -> None:
        self.scenario = scenario
        self.mode = scenario.mode
        self.objects: dict[int, StoredObject] = {}
        for k in scenario.keys:
            self.objects[k.id] = StoredObject(
                id=k.id, value=k.value, type=k.type, attrs=k.attrs,
                caps=k.caps, delcaps=k.delcaps, exportable=k.exportable)
        self._next_fresh = FRESH_ID_BASE
        self.created: set[int] = set()

    # --- attacker-side (offline) operations -------------------------------

    def known_key(self, key_id: int) -> bytes:
        try:
            return self.scenario.known_values[key_id]
        except KeyError:
            raise TokenError(f"value of key {key_id} is not known "
                             "outside the token") from None

    def fresh_id(self) -> int:
        self._next_fresh += 1
        return self._next_fresh - 1

    def craft_wrap(self, key_value: bytes, *args) -> bytes:
        if len(args) == 1:
            obj = StoredObject(id=0, value=bytes(args[0]))
        elif len(args) == 5:
            obj_id, value, type_, caps, delcaps = args
            if not (_is_bools(caps, 4) and _is_bools(delcaps, 4)):
                raise TokenError("craft_wrap needs capability tuples "
                                 "(use mocktoken.caps)")
            obj = StoredObject(id=int(obj_id), value=bytes(value),
                               type=str(type_), caps=caps, delcaps=delcaps)
        else:
            raise TokenError("craft_wrap takes (key, value) or "
                             "(key, id, value, type, caps, delcaps)")
        return _seal(bytes(key_value), obj.wrap_payload(), AAD_WRAP)

    def open_wrap(self, key_value: bytes, blob: bytes) -> bytes:
        return payload_object(_open(bytes(key_value), bytes(blob), AAD_WRAP)).value

    def report(self, value: bytes) -> bool:
        for key_id, planted in sorted(self.scenario.sensitive_values().items()):
            if bytes(value) == planted:
                print(f"EXTRACTED {key_id} {planted.hex()}")
                return True
        return False

    # --- shared helpers ----------------------------------------------------

    def require_mode(self, op: str, *modes: str) -> None:
        if self.mode not in modes:
            raise TokenError(f"{op} is not available in {self.mode} mode")

    def object(self, obj_id: int) -> StoredObject:
        try:
            return self.objects[int(obj_id)]
        except KeyError:
            raise TokenError(f"no object with id {obj_id}") from None

    def store(self, obj: StoredObject) -> int:
        if obj.id in self.objects:
            raise TokenError(f"object id {obj.id} is already in use")
        self.objects[obj.id] = obj
        self.created.add(obj.id)
        return obj.id

    def next_object_id(self) -> int:
        return max([i for i in self.objects if i < FRESH_ID_BASE], default=0) + 1

    def delete(self, obj_id: int) -> None:
        self.object(obj_id)
        del self.objects[obj_id]
        self.created.discard(obj_id)

    def state(self) -> dict:
        return {
            "mode": self.mode,
            "objects": sorted(self.objects),
            "created": sorted(self.created),
        }


class Session:
    """One authenticated connection to the token.

    Objects created through the session are tracked so ``cleanup`` can
    remove them again.
    """

    def __init__(self, token: Token) -> None:
        self.token = token
        self.created: list[int] = []

    def _store(self, obj: StoredObject) -> int:
        obj_id = self.token.store(obj)
        self.created.append(obj_id)
        return obj_id

    # --- object creation ---------------------------------------------------

    def put_key(self, value: bytes, *args) -> int:
        self.token.require_mode("put_key", "simple", "yubihsm")
        if self.token.mode == "simple":
            if len(args) != 1 or not isinstance(args[0], str):
                raise TokenError('put_key takes (value, type) in simple mode')
            return self._store(StoredObject(
                id=self.token.next_object_id(), value=bytes(value),
                type=args[0]))
        if len(args) != 2 or not (_is_bools(args[0], 4) and _is_bools(args[1], 4)):
            raise TokenError("put_key takes (value, caps, delcaps) in "
                             "yubihsm mode (use mocktoken.caps)")
        caps, delcaps = args
        if not self.token.scenario.session_caps[3]:
            raise TokenError("session lacks the put-wrap-key capability")
        if not _subset(caps, self.token.scenario.session_delcaps):
            raise TokenError("requested capabilities exceed what the "
                             "session may delegate")
        if not _subset(delcaps, self.token.scenario.session_delcaps):
            raise TokenError("requested delegated capabilities exceed what "
                             "the session may delegate")
        return self._store(StoredObject(
            id=self.token.next_object_id(), value=bytes(value),
            type="wrapkey", caps=caps, delcaps=delcaps))

    def generate_key(self, attrs: tuple[bool, ...]) -> int:
        self.token.require_mode("generate_key", "pkcs11")
        if not _is_bools(attrs, 6):
            raise TokenError("generate_key needs an attribute tuple "
                             "(use mocktoken.attrs)")
        seed = f"generated-{self.token.next_object_id()}-{len(self.token.objects)}"
        value = hashlib.sha256(seed.encode()).digest()
        return self._store(StoredObject(
            id=self.token.next_object_id(), value=value, attrs=attrs))

    # --- wrap / unwrap -----------------------------------------------------

    def wrap(self, wrap_id: int, target_id: int) -> bytes:
        wrapper = self.token.object(wrap_id)
        target = self.token.object(target_id)
        mode = self.token.mode
        if mode == "simple":
            if wrapper.type != "wrapkey":
                raise TokenError(f"object {wrapper.id} is not a wrap key")
            if not target.exportable:
                raise TokenError(f"object {target.id} is not exportable")
            return _seal(wrapper.value, target.wrap_payload(), AAD_WRAP)
        if mode == "pkcs11":
            if not wrapper.attrs[2]:
                raise TokenError(f"object {wrapper.id} lacks the wrap attribute")
            if not target.attrs[1]:
                raise TokenError(f"object {target.id} is not extractable")
            # flaw under test: wrapping is plain encryption of the key bytes
            return _seal(wrapper.value, target.value, AAD_DATA)
        if not self.token.scenario.session_caps[0]:
            raise TokenError("session lacks the export-wrapped capability")
        if wrapper.type != "wrapkey" or not wrapper.caps[0]:
            raise TokenError(f"object {wrapper.id} cannot export wraps")
        if not target.caps[2]:
            raise TokenError(f"object {target.id} is not exportable under wrap")
        return _seal(wrapper.value, target.wrap_payload(), AAD_WRAP)

    def unwrap(self, wrap_id: int, blob: bytes, *args) -> int:
        wrapper = self.token.object(wrap_id)
        mode = self.token.mode
        if mode == "simple":
            raise TokenError("unwrap is not available in simple mode")
        if mode == "pkcs11":
            if len(args) != 1 or not _is_bools(args[0], 6):
                raise TokenError("unwrap takes (wrap_id, blob, attrs) in "
                                 "pkcs11 mode (use mocktoken.attrs)")
            if not wrapper.attrs[3]:
                raise TokenError(f"object {wrapper.id} lacks the unwrap attribute")
            value = _open(wrapper.value, bytes(blob), AAD_DATA)
            return self._store(StoredObject(
                id=self.token.next_object_id(), value=value, attrs=args[0]))
        if args:
            raise TokenError("unwrap takes (wrap_id, blob) in yubihsm mode")
        if not self.token.scenario.session_caps[1]:
            raise TokenError("session lacks the import-wrapped capability")
        if wrapper.type != "wrapkey" or not wrapper.caps[1]:
            raise TokenError(f"object {wrapper.id} cannot import wraps")
        obj = payload_object(_open(wrapper.value, bytes(blob), AAD_WRAP))
        if not _subset(obj.caps, wrapper.delcaps):
            raise TokenError("imported capabilities exceed what the wrap "
                             "key may delegate")
        if not _subset(obj.delcaps, wrapper.delcaps):
            raise TokenError("imported delegated capabilities exceed what "
                             "the wrap key may delegate")
        return self._store(replace(obj, exportable=False))

    # --- data channel ------------------------------------------------------
    # Wrap blobs and data ciphertexts share one channel in pkcs11 mode but
    # carry distinct authenticated headers in yubihsm mode, so a yubihsm
    # decrypt can never open a wrap.

    def encrypt(self, obj_id: int, data: bytes) -> bytes:
        self.token.require_mode("encrypt", "pkcs11", "yubihsm")
        obj = self.token.object(obj_id)
        if self.token.mode == "pkcs11" and not obj.attrs[4]:
            raise TokenError(f"object {obj.id} lacks the encrypt attribute")
        return _seal(obj.value, bytes(data), AAD_DATA)

    def decrypt(self, obj_id: int, blob: bytes) -> bytes:
        self.token.require_mode("decrypt", "pkcs11", "yubihsm")
        obj = self.token.object(obj_id)
        if self.token.mode == "pkcs11" and not obj.attrs[5]:
            raise TokenError(f"object {obj.id} lacks the decrypt attribute")
        return _open(obj.value, bytes(blob), AAD_DATA)

    # --- teardown ----------------------------------------------------------

    def cleanup(self) -> None:
        for obj_id in self.created:
            if obj_id in self.token.objects:
                self.token.delete(obj_id)
        self.created.clear()
