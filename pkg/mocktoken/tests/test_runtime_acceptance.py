"""Acceptance gate for the token runtime, one printed verdict line each.

End-to-end extraction regenerates every PoC with the attack-search pipeline
and executes it in a subprocess against the matching scenario. Confinement
drives long random call sequences against single-key stores whose key can
never legitimately leave the token.
"""

import random
import time

import pytest

import mocktoken
from mocktoken import TokenError
from mocktoken.harness import run_poc
from mocktoken.scenario import key_value, parse_scenario

from hornpoc.codegen import render, translate_tree
from hornpoc.engine import DeriveStatus, derive
from hornpoc.library import list_entries


def verdict(capsys, ok: bool, label: str, detail: str = "") -> None:
    with capsys.disabled():
        state = "PASS" if ok else "FAIL"
        extra = f" ({detail})" if detail else ""
        print(f"[acceptance] {state}: {label}{extra}")
    assert ok, label


def test_end_to_end_extraction_for_every_entry(tmp_path, capsys):
    failures = []
    ran = 0
    for entry in list_entries():
        if not entry.expect_attack:
            continue
        model = entry.load()
        result = derive(model, model.queries[0], entry.budget)
        assert result.status is DeriveStatus.ATTACK
        poc = tmp_path / f"{entry.name}.py"
        poc.write_text(render(translate_tree(model, result.tree), model.name,
                              model.queries[0].fact))
        outcome = run_poc(entry.scenario_path(), poc)
        ran += 1
        if not outcome.success:
            failures.append(f"{entry.name}: {outcome.reason}")
            continue
        scenario = parse_scenario(entry.scenario_text())
        planted = scenario.sensitive_values()
        if any(planted.get(i) != v for i, v in outcome.extracted.items()):
            failures.append(f"{entry.name}: extracted value mismatch")
    detail = f"{ran} entries" if not failures else "; ".join(failures)
    verdict(capsys, ran == 13 and not failures,
            "every generated PoC extracts its planted key and cleans up",
            detail)


CONFINED_STORES = {
    "simple": """
mode simple
key id=1 seed=secret type=wrapkey flags=sensitive
""",
    "pkcs11": """
mode pkcs11
key id=1 seed=secret attrs=sensitive,wrap,unwrap,encrypt,decrypt
""",
    "yubihsm": """
mode yubihsm
session caps=export-wrapped,import-wrapped,put-wrap-key delcaps=export-wrapped,import-wrapped,exportable-under-wrap,put-wrap-key
key id=1 seed=secret type=wrapkey caps=export-wrapped,import-wrapped delcaps=export-wrapped,import-wrapped,exportable-under-wrap,put-wrap-key flags=sensitive
""",
}


def random_attrs(rng):
    return tuple(rng.random() < 0.5 for _ in range(6))


def random_caps(rng):
    return tuple(rng.random() < 0.5 for _ in range(4))


def drive_sequence(rng, mode: str, secret: bytes) -> list[bytes]:
    """One random API-call sequence; returns every byte string obtained."""
    token = mocktoken.activate(parse_scenario(CONFINED_STORES[mode]))
    session = mocktoken.connect()
    ids = [1]
    vals = [b"\x11" * 32, rng.randbytes(32)]
    blobs = [rng.randbytes(45)]
    outputs: list[bytes] = []

    def got(value):
        if isinstance(value, (bytes, bytearray)):
            outputs.append(bytes(value))
            blobs.append(bytes(value))
            vals.append(bytes(value)[:32] or b"\x00" * 32)
        elif isinstance(value, int):
            ids.append(value)

    for _ in range(12):
        op = rng.randrange(8)
        try:
            if op == 0 and mode != "pkcs11":
                if mode == "simple":
                    got(session.put_key(rng.choice(vals),
                                        rng.choice(["wrapkey", "data"])))
                else:
                    got(session.put_key(rng.choice(vals), random_caps(rng),
                                        random_caps(rng)))
            elif op == 1 and mode == "pkcs11":
                got(session.generate_key(random_attrs(rng)))
            elif op == 2:
                got(session.wrap(rng.choice(ids), rng.choice(ids)))
            elif op == 3 and mode == "pkcs11":
                got(session.unwrap(rng.choice(ids), rng.choice(blobs),
                                   random_attrs(rng)))
            elif op == 3 and mode == "yubihsm":
                got(session.unwrap(rng.choice(ids), rng.choice(blobs)))
            elif op == 4 and mode != "simple":
                got(session.encrypt(rng.choice(ids), rng.choice(vals)))
            elif op == 5 and mode != "simple":
                got(session.decrypt(rng.choice(ids), rng.choice(blobs)))
            elif op == 6:
                if mode == "yubihsm":
                    got(mocktoken.craft_wrap(
                        rng.choice(vals), mocktoken.fresh_id(),
                        rng.choice(vals), rng.choice(["wrapkey", "data"]),
                        random_caps(rng), random_caps(rng)))
                else:
                    got(mocktoken.craft_wrap(rng.choice(vals),
                                             rng.choice(vals)))
            else:
                got(mocktoken.open_wrap(rng.choice(vals), rng.choice(blobs)))
        except TokenError:
            continue
    assert token.objects[1].value == secret  # the key itself never changes
    return outputs


def test_confinement_under_random_probing(capsys):
    rng = random.Random(20260823)
    secret = key_value("secret")
    sequences = 0
    leaks = 0
    start = time.monotonic()
    for i in range(1000):
        mode = ("simple", "pkcs11", "yubihsm")[i % 3]
        outputs = drive_sequence(rng, mode, secret)
        sequences += 1
        leaks += sum(secret in out for out in outputs)
    mocktoken.deactivate()
    elapsed = time.monotonic() - start
    verdict(capsys, sequences == 1000 and leaks == 0,
            "random probing never reveals a confined key",
            f"1000 sequences, {leaks} leaks, {elapsed:.1f}s")
