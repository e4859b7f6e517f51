#!/usr/bin/env python3
"""Run the attack search over every bundled model and emit the PoCs.

Prints one row per model (status, tree depth, nodes, time, generated lines)
and writes the PoC programs plus derivation dumps under out/ (or the
directory given as the first argument).
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

from hornpoc.codegen import render, sanitize_query, translate_tree
from hornpoc.engine import DeriveStatus, check_tree, derive, dump_tree
from hornpoc.library import list_entries


def main() -> int:
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    outdir.mkdir(parents=True, exist_ok=True)
    print(f"{'model':<16} {'status':<10} {'depth':>5} {'nodes':>7} "
          f"{'ms':>8} {'lines':>5}")
    failures = 0
    for entry in list_entries():
        model = entry.load()
        query = model.queries[0]
        start = time.monotonic()
        result = derive(model, query, entry.budget)
        elapsed = (time.monotonic() - start) * 1000
        if result.status is not DeriveStatus.ATTACK:
            print(f"{entry.name:<16} {result.status.value:<10} "
                  f"{result.depth:>5} {result.nodes_expanded:>7} {elapsed:>8.1f}     -")
            failures += 1
            continue
        problems = check_tree(model, result.tree)
        if problems:
            print(f"{entry.name:<16} bad-tree: {problems[0].message}")
            failures += 1
            continue
        prog = translate_tree(model, result.tree)
        stem = f"{entry.name}_{sanitize_query(query.fact)}"
        (outdir / f"{stem}.py").write_text(
            render(prog, model.name, query.fact))
        (outdir / f"{stem}.dump.txt").write_text(dump_tree(result.tree))
        print(f"{entry.name:<16} {result.status.value:<10} {result.depth:>5} "
              f"{result.nodes_expanded:>7} {elapsed:>8.1f} {len(prog.body_lines):>5}")
    print(f"\nartifacts in {outdir}/")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
