#!/usr/bin/env python3
"""Generate a PoC for every bundled model and execute it on the mock token.

For each library entry: search for the attack, render the PoC, then hand it
to the run-poc harness together with the entry's scenario file. Prints one
verdict line per entry and exits non-zero if any PoC fails.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

from hornpoc.codegen import render, translate_tree
from hornpoc.engine import DeriveStatus, derive
from hornpoc.library import list_entries
from mocktoken.harness import run_poc


def main() -> int:
    failures = 0
    with tempfile.TemporaryDirectory(prefix="poc-") as tmp:
        for entry in list_entries():
            if not entry.expect_attack:
                continue
            model = entry.load()
            result = derive(model, model.queries[0], entry.budget)
            if result.status is not DeriveStatus.ATTACK:
                print(f"{entry.name:<16} no attack found ({result.status.value})")
                failures += 1
                continue
            poc = Path(tmp) / f"{entry.name}.py"
            poc.write_text(render(translate_tree(model, result.tree),
                                  model.name, model.queries[0].fact))
            outcome = run_poc(entry.scenario_path(), poc)
            print(f"{entry.name:<16} {outcome.summary()}")
            failures += not outcome.success
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
