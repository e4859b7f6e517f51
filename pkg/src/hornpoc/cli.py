"""Command line front end.

    hornpoc MODEL [-in exthorntype] [-out poc|attack-dump] [-o DIR]
            [--max-depth N] [--max-nodes N] [--timeout-ms N]
            [--fail-on-no-attack] [--parallel-queries]

MODEL is a file path or the name of a bundled model. Every query in the
model is searched; one summary line is printed per query and, with an
output directory, one artifact file per query that has an attack. Artifact
writes are atomic (temp file plus rename). Exit status: 0 on a clean run,
1 when --fail-on-no-attack is set and some query has no attack, 2 on
errors. HORNPOC_COLOR=always|never|auto controls the summary colors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .codegen import render, sanitize_query, translate_tree
from .engine import DeriveResult, DeriveStatus, SearchBudget, derive, dump_tree
from .library import LibraryError, get_entry
from .model import Model, Query
from .parser import parse_model


def _use_color() -> bool:
    mode = os.environ.get("HORNPOC_COLOR", "auto")
    if mode == "always":
        return True
    if mode == "never":
        return False
    return sys.stdout.isatty()


def _paint(text: str, code: str, color: bool) -> str:
    return f"\033[{code}m{text}\033[0m" if color else text


def _summary(q: Query, r: DeriveResult, color: bool) -> str:
    if r.status is DeriveStatus.ATTACK:
        verdict = _paint("ATTACK", "32", color)
        detail = f"depth {r.depth}, {r.nodes_expanded} nodes, {r.elapsed_ms:.1f} ms"
    elif r.status is DeriveStatus.NOT_FOUND:
        verdict = _paint("NO ATTACK", "33", color)
        detail = f"search space exhausted at depth {r.depth}"
    else:
        verdict = _paint("NO ATTACK", "33", color)
        detail = (f"bound reached: depth {r.depth}, {r.nodes_expanded} nodes, "
                  f"{r.elapsed_ms:.1f} ms")
    return f"query {q.fact}: {verdict} ({detail})"


def _atomic_write(path: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(content)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load_model(source: str) -> tuple[Model | None, list]:
    path = Path(source)
    if path.exists():
        result = parse_model(path.read_text(), str(path))
        return result.model, result.diagnostics
    if "/" in source or source.endswith(".exthorntype"):
        raise FileNotFoundError(f"{source}: no such file")
    return get_entry(source).load(), []


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="hornpoc",
        description="Search security API models for attacks and emit PoC programs.")
    ap.add_argument("model", help="model file or bundled model name")
    ap.add_argument("-in", dest="informat", default="exthorntype",
                    choices=["exthorntype"], help="input format")
    ap.add_argument("-out", dest="outformat", default="poc",
                    choices=["poc", "attack-dump"], help="artifact format")
    ap.add_argument("-o", dest="outdir", metavar="DIR",
                    help="artifact directory (default: print to stdout)")
    ap.add_argument("--max-depth", type=int, default=12)
    ap.add_argument("--max-nodes", type=int, default=100_000)
    ap.add_argument("--timeout-ms", type=int, default=300_000)
    ap.add_argument("--fail-on-no-attack", action="store_true",
                    help="exit 1 if any query has no attack")
    ap.add_argument("--parallel-queries", action="store_true",
                    help="search the model's queries concurrently")
    args = ap.parse_args(argv)
    color = _use_color()

    try:
        model, diagnostics = _load_model(args.model)
    except (FileNotFoundError, LibraryError) as exc:
        print(f"hornpoc: error: {exc}", file=sys.stderr)
        return 2
    for d in diagnostics:
        print(f"hornpoc: {d}", file=sys.stderr)
    if model is None:
        return 2
    if not model.queries:
        print("hornpoc: error: model declares no query", file=sys.stderr)
        return 2

    budget = SearchBudget(args.max_depth, args.max_nodes, args.timeout_ms)
    if args.parallel_queries and len(model.queries) > 1:
        with ThreadPoolExecutor(max_workers=len(model.queries)) as pool:
            results = list(pool.map(lambda q: derive(model, q, budget), model.queries))
    else:
        results = [derive(model, q, budget) for q in model.queries]

    outdir = Path(args.outdir) if args.outdir else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)

    missing = False
    for i, (q, r) in enumerate(zip(model.queries, results), start=1):
        print(_summary(q, r, color))
        for w in r.warnings:
            print(f"hornpoc: warning: {w}", file=sys.stderr)
        if r.status is not DeriveStatus.ATTACK:
            missing = True
            continue
        if args.outformat == "poc":
            artifact = render(translate_tree(model, r.tree), model.name, q.fact)
            suffix = "py"
        else:
            artifact = dump_tree(r.tree)
            suffix = "txt"
        if outdir is None:
            print(artifact, end="")
        else:
            _atomic_write(outdir / f"{i}_{sanitize_query(q.fact)}.{suffix}", artifact)

    if missing and args.fail_on_no_attack:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
