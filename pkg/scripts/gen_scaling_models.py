#!/usr/bin/env python3
"""Generate the scaling variants of the bundled models.

pkcs11_exp3/4/5 extend pkcs11_exp1 with 2/4/10 filler keys (sensitive,
non-extractable, random other attributes), and yubihsm2_exp7 extends
yubihsm2_exp1 with 10 filler objects that are not exportable under wrap.
Filler configurations are drawn from a fixed seed, so reruns are
byte-identical; the outputs are checked in next to the hand-written models.
"""

from __future__ import annotations

import random
from pathlib import Path

MODELS = Path(__file__).resolve().parent.parent / "src" / "hornpoc" / "models"

PKCS11_ATTRS = ("wrap", "unwrap", "encrypt", "decrypt")
YUBIHSM_TYPES = ("data", "hmac")


def gen_pkcs11(exp: int, fillers: int, rng: random.Random) -> None:
    base = (MODELS / "pkcs11_exp1.exthorntype").read_text()
    scenario = (MODELS / "pkcs11_exp1.scenario").read_text()
    head = base.split("\n//", 1)[0]
    text = base.replace(head, f"""// PKCS#11-style token as in the two-key configuration, padded with
// {fillers} filler keys (sensitive, non-extractable, random remaining
// attributes) to grow the search space without changing the attack.""")
    text = text.replace("pkcs11_exp1.scenario", f"pkcs11_exp{exp}.scenario")

    names, clauses, scenario_lines = [], [], []
    for i in range(fillers):
        hid = i + 3
        chosen = sorted(rng.sample(PKCS11_ATTRS, rng.randint(0, 2)),
                        key=PKCS11_ATTRS.index)
        bools = ["true", "false"] + [
            "true" if a in chosen else "false" for a in PKCS11_ATTRS]
        names.append(f"name fk{hid}[]: key.")
        names.append(f"fun h{hid}(): hdl (**| {hid} **).")
        clauses.append(
            f'clause "initial filler key {hid}"\n'
            f"  => storedkey(h{hid}, fk{hid}[], attributes({', '.join(bools)})).")
        attrs = ",".join(["sensitive"] + chosen)
        scenario_lines.append(f"key id={hid} seed=filler{hid} attrs={attrs}")

    text = text.replace("fun senc(key, key): key.",
                        "\n".join(names) + "\nfun senc(key, key): key.")
    anchor = 'clause "bool false" => kbool(false).'
    text = text.replace(anchor, "\n".join(clauses) + "\n\n" + anchor)
    (MODELS / f"pkcs11_exp{exp}.exthorntype").write_text(text)
    (MODELS / f"pkcs11_exp{exp}.scenario").write_text(
        scenario.rstrip("\n") + "\n" + "\n".join(scenario_lines) + "\n")


def gen_yubihsm(exp: int, fillers: int, rng: random.Random) -> None:
    base = (MODELS / "yubihsm2_exp1.exthorntype").read_text()
    scenario = (MODELS / "yubihsm2_exp1.scenario").read_text()
    head = base.split("\n\ntype val.", 1)[0]
    text = base.replace(head, f"""// HSM configuration identical to the known-wrap-key one, padded with
// {fillers} filler objects that are not exportable under wrap, to grow the
// search space without changing the attack.""")
    text = text.replace("yubihsm2_exp1.scenario", f"yubihsm2_exp{exp}.scenario")
    if "fun hmackey(): ktype." not in text:
        text = text.replace("fun datakey(): ktype.",
                            "fun datakey(): ktype.\nfun hmackey(): ktype.")

    names, clauses, scenario_lines = [], [], []
    for i in range(fillers):
        oid = i + 3
        ktype = rng.choice(YUBIHSM_TYPES)
        iw = rng.random() < 0.5
        caps = f"capset(false, {'true' if iw else 'false'}, false, false)"
        names.append(f"name fv{oid}[]: val.")
        names.append(f"fun id{oid}(): oid (**| {oid} **).")
        clauses.append(
            f'clause "initial filler object {oid}"\n'
            f"  => storedobj(object(id{oid}, fv{oid}[], "
            f"{'hmackey' if ktype == 'hmac' else 'datakey'},\n"
            f"                      {caps},\n"
            f"                      capset(false, false, false, false))).")
        caps_tok = "import-wrapped" if iw else ""
        scenario_lines.append(
            f"key id={oid} seed=filler{oid} type={ktype} caps={caps_tok} delcaps=")

    text = text.replace("fun object(oid, val, ktype, caps, caps): obj.",
                        "\n".join(names) + "\nfun object(oid, val, ktype, caps, caps): obj.")
    anchor = 'clause "leq ff" => leq(false, false).'
    text = text.replace(anchor, "\n".join(clauses) + "\n\n" + anchor)
    (MODELS / f"yubihsm2_exp{exp}.exthorntype").write_text(text)
    (MODELS / f"yubihsm2_exp{exp}.scenario").write_text(
        scenario.rstrip("\n") + "\n" + "\n".join(scenario_lines) + "\n")


def main() -> None:
    rng = random.Random(20260823)
    gen_pkcs11(3, 2, rng)
    gen_pkcs11(4, 4, rng)
    gen_pkcs11(5, 10, rng)
    gen_yubihsm(7, 10, rng)
    print("wrote pkcs11_exp3/4/5 and yubihsm2_exp7 (+ scenarios)")


if __name__ == "__main__":
    main()
