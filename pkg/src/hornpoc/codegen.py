"""Translate derivation trees into proof-of-concept programs.

Each annotated clause instance becomes one line of code; terms inside
template holes are rendered either through their function symbol's template
or through a fresh, stable literal shared by every later reference to the
same term. Nodes are emitted in depth-first post-order so a line's inputs
are always defined by earlier lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import DerivationNode, DerivationTree
from .model import (
    Fact,
    IndexHole,
    LiteralSegment,
    Model,
    TermHole,
)
from .terms import FunApp, Substitution, Term, apply, is_closed

VERSION = "0.1.0"


class CodegenError(Exception):
    pass


@dataclass
class LiteralAllocator:
    """Injective fresh-literal assignment: x1, x2, ... in first-use order."""

    memo: dict[Term, str] = field(default_factory=dict)
    counter: int = 0

    def literal(self, t: Term) -> str:
        if t not in self.memo:
            self.counter += 1
            self.memo[t] = f"x{self.counter}"
        return self.memo[t]


@dataclass(frozen=True)
class PocProgram:
    header: str
    body_lines: tuple[tuple[str, int], ...]  # (line, post-order node id)
    footer: str


def translate_term(alloc: LiteralAllocator, t: Term) -> str:
    """Render a closed term: through its symbol's template when one exists,
    otherwise as the allocator's literal for the whole term."""
    if not is_closed(t):
        raise CodegenError(f"cannot translate open term {t}")
    if isinstance(t, FunApp) and t.symbol.annotation is not None:
        out = []
        for seg in t.symbol.annotation.segments:
            if isinstance(seg, LiteralSegment):
                out.append(seg.text)
            else:
                assert isinstance(seg, IndexHole)
                out.append(translate_term(alloc, t.args[seg.index - 1]))
        return "".join(out)
    return alloc.literal(t)


def translate_node(node: DerivationNode, alloc: LiteralAllocator) -> str:
    """One line of code for an annotated node; the empty string otherwise."""
    annotation = node.clause.annotation
    if annotation is None:
        return ""
    out = []
    for seg in annotation.segments:
        if isinstance(seg, LiteralSegment):
            out.append(seg.text)
            continue
        assert isinstance(seg, TermHole)
        instance = apply(node.sub, seg.term)
        if not is_closed(instance):
            raise CodegenError(
                f"clause {node.clause.label!r}: hole {seg.term} instantiates to the "
                f"open term {instance}")
        out.append(translate_term(alloc, instance))
    return "".join(out)


def translate_tree(m: Model, t: DerivationTree) -> PocProgram:
    """Depth-first post-order translation with one shared allocator.

    A tree may re-derive the same ground fact in two subtrees; both nodes
    instantiate to byte-identical lines, which denote one runtime event and
    are emitted once."""
    alloc = LiteralAllocator()
    body: list[tuple[str, int]] = []
    emitted: set[str] = set()
    next_id = 0

    def visit(node: DerivationNode) -> None:
        nonlocal next_id
        for child in node.children:
            visit(child)
        next_id += 1
        line = translate_node(node, alloc)
        if line and line not in emitted:
            emitted.add(line)
            body.append((line, next_id))

    visit(t.subroot)
    return PocProgram(m.header or "", tuple(body), m.footer or "")


def render(p: PocProgram, model_name: str, query: Fact,
           instantiation: Substitution | None = None) -> str:
    """Final program text with the generated-file stamp."""
    lines = [f"# generated-by: hornpoc {VERSION} model={model_name} query={query}"]
    if instantiation is not None and instantiation.bindings:
        lines.append(f"# query instantiated with {instantiation}")
    if p.header:
        lines.append(p.header)
    lines.append("")
    lines.extend(text for text, _ in p.body_lines)
    lines.append("")
    if p.footer:
        lines.append(p.footer)
    return "\n".join(lines) + "\n"


def sanitize_query(query: Fact) -> str:
    """File-name-safe rendering of a query fact."""
    out = []
    for ch in str(query):
        out.append(ch if ch.isalnum() else "_")
    collapsed = "".join(out).strip("_")
    while "__" in collapsed:
        collapsed = collapsed.replace("__", "_")
    return collapsed or "query"
