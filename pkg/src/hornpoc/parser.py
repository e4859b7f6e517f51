"""Parser and pretty-printer for `.exthorntype` model files.

Surface syntax:

    // line comment
    type key.
    name key1[]: key.
    name handle[key]: hdl.
    fun enc(key, key): key.
    fun wrapkey(): keytype (** literal template **).
    pred iknows(key).
    header (** ... **)
    clause "label" F1 && F2 => F (**| |t| literal |t2| **).
    clause "label" => F.
    query iknows(key1[]).
    footer (** ... **)

Facts are `p(t1,...,tn)` or disequalities `t1 <> t2`. A bare identifier is
a declared 0-ary function if one exists, otherwise a variable whose type is
inferred from its position. Annotations sit between `(**` and `**)`; for
clause and function annotations the first non-whitespace character of the
body is the hole delimiter. The body sequence `*\\)` stands for the literal
two characters `*)`, which is how a closing bracket is smuggled into
template text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .model import (
    Clause,
    ClauseAnnotation,
    Diagnostic,
    FunctionSymbolAnnotation,
    IndexHole,
    LiteralSegment,
    Model,
    NameSignature,
    Predicate,
    PredicateSymbol,
    Disequality,
    Fact,
    Query,
    Severity,
    SourceSpan,
    TermHole,
    errors,
    validate,
)
from .terms import ANY_TYPE, FunApp, FunctionSymbol, Name, Term, TypeName, Variable

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_'-]*")


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.diagnostic = Diagnostic(Severity.ERROR, message, span)


@dataclass(frozen=True)
class RawAnnotation:
    delimiter: Optional[str]  # None for header/footer bodies
    body: str
    span: SourceSpan


@dataclass
class ParseResult:
    model: Optional[Model]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.model is not None and not errors(self.diagnostics)


class _Scanner:
    def __init__(self, text: str, filename: str):
        self.text = text
        self.filename = filename
        self.pos = 0

    def span(self, start: int, length: int = 1) -> SourceSpan:
        line = self.text.count("\n", 0, start) + 1
        col = start - (self.text.rfind("\n", 0, start) + 1) + 1
        return SourceSpan(self.filename, line, col, length)

    def skip_trivia(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isspace():
                self.pos += 1
            elif self.text.startswith("//", self.pos):
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl < 0 else nl + 1
            else:
                return

    def at_end(self) -> bool:
        self.skip_trivia()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        self.skip_trivia()
        return self.text.startswith(literal, self.pos)

    def accept(self, literal: str) -> bool:
        if self.peek(literal):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            got = self.text[self.pos:self.pos + 12] or "<eof>"
            raise ParseError(f"expected {literal!r}, found {got!r}", self.span(self.pos))

    def ident(self, what: str = "identifier") -> str:
        self.skip_trivia()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            got = self.text[self.pos:self.pos + 12] or "<eof>"
            raise ParseError(f"expected {what}, found {got!r}", self.span(self.pos))
        self.pos = m.end()
        return m.group()

    def string(self) -> str:
        self.skip_trivia()
        if not self.text.startswith('"', self.pos):
            raise ParseError("expected string literal", self.span(self.pos))
        end = self.text.find('"', self.pos + 1)
        if end < 0:
            raise ParseError("unterminated string literal", self.span(self.pos))
        out = self.text[self.pos + 1:end]
        self.pos = end + 1
        return out

    def annotation(self, raw: bool) -> RawAnnotation:
        """Scan `(** ... **)`; the cursor sits right before `(**`."""
        self.skip_trivia()
        start = self.pos
        self.expect("(**")
        chunks: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError("unterminated annotation", self.span(start, 3))
            if self.text.startswith("*\\)", self.pos):
                chunks.append("*)")
                self.pos += 3
                continue
            if self.text.startswith("**)", self.pos):
                self.pos += 3
                break
            chunks.append(self.text[self.pos])
            self.pos += 1
        body = "".join(chunks)
        span = self.span(start, self.pos - start)
        if raw:
            return RawAnnotation(None, _trim_block(body), span)
        stripped = body.lstrip()
        if not stripped:
            raise ParseError("annotation is missing a hole delimiter", span)
        return RawAnnotation(stripped[0], stripped[1:].strip(), span)


def _trim_block(body: str) -> str:
    """Header/footer bodies keep interior bytes; outer blank edges are dropped."""
    body = body[1:] if body.startswith("\n") else body.lstrip(" \t")
    return body.rstrip(" \t\n")


def _split_holes(raw: RawAnnotation) -> list[tuple[bool, str, SourceSpan]]:
    """Alternate (is_hole, text) chunks; empty literals are dropped."""
    parts = raw.body.split(raw.delimiter)
    if len(parts) % 2 == 0:
        raise ParseError(
            f"unbalanced hole delimiter {raw.delimiter!r} in annotation", raw.span
        )
    out = []
    for i, part in enumerate(parts):
        if i % 2 == 0 and part == "":
            continue
        out.append((i % 2 == 1, part, raw.span))
    return out


class _Parser:
    def __init__(self, text: str, filename: str, name: str):
        self.s = _Scanner(text, filename)
        self.name = name
        self.types: list[TypeName] = [ANY_TYPE]
        self.functions: list[FunctionSymbol] = []
        self.predicates: list[PredicateSymbol] = []
        self.names: list[NameSignature] = []
        self.clauses: list[Clause] = []
        self.queries: list[Query] = []
        self.header: Optional[str] = None
        self.footer: Optional[str] = None
        self.diagnostics: list[Diagnostic] = []

    # -- declarations ------------------------------------------------------

    def run(self) -> ParseResult:
        try:
            while not self.s.at_end():
                keyword = self.s.ident("declaration keyword")
                handler = getattr(self, f"_parse_{keyword}", None)
                if handler is None:
                    raise ParseError(f"unknown declaration {keyword!r}",
                                     self.s.span(self.s.pos - len(keyword), len(keyword)))
                handler()
        except ParseError as exc:
            self.diagnostics.append(exc.diagnostic)
            return ParseResult(None, self.diagnostics)
        model = Model(
            name=self.name,
            types=tuple(self.types),
            functions=tuple(self.functions),
            predicates=tuple(self.predicates),
            names=tuple(self.names),
            clauses=tuple(self.clauses),
            queries=tuple(self.queries),
            header=self.header,
            footer=self.footer,
        )
        self.diagnostics.extend(validate(model))
        if errors(self.diagnostics):
            return ParseResult(None, self.diagnostics)
        return ParseResult(model, self.diagnostics)

    def _parse_type(self) -> None:
        t = self.s.ident("type name")
        self.s.expect(".")
        if t in self.types:
            raise ParseError(f"duplicate type {t!r}", self.s.span(self.s.pos - 1))
        self.types.append(t)

    def _type_ref(self) -> TypeName:
        start = self.s.pos
        t = self.s.ident("type name")
        if t not in self.types:
            raise ParseError(f"unknown type {t!r}", self.s.span(start, len(t)))
        return t

    def _parse_name(self) -> None:
        ident = self.s.ident("name identifier")
        self.s.expect("[")
        params: list[TypeName] = []
        if not self.s.accept("]"):
            params.append(self._type_ref())
            while self.s.accept(","):
                params.append(self._type_ref())
            self.s.expect("]")
        self.s.expect(":")
        result = self._type_ref()
        self.s.expect(".")
        self.names.append(NameSignature(ident, tuple(params), result))

    def _parse_fun(self) -> None:
        ident = self.s.ident("function identifier")
        self.s.expect("(")
        params: list[TypeName] = []
        if not self.s.accept(")"):
            params.append(self._type_ref())
            while self.s.accept(","):
                params.append(self._type_ref())
            self.s.expect(")")
        self.s.expect(":")
        result = self._type_ref()
        annotation = None
        if self.s.peek("(**"):
            raw = self.s.annotation(raw=False)
            annotation = self._elaborate_fun_annotation(raw, len(params))
        self.s.expect(".")
        self.functions.append(FunctionSymbol(ident, tuple(params), result, annotation))

    def _parse_pred(self) -> None:
        ident = self.s.ident("predicate identifier")
        self.s.expect("(")
        params: list[TypeName] = []
        if not self.s.accept(")"):
            params.append(self._type_ref())
            while self.s.accept(","):
                params.append(self._type_ref())
            self.s.expect(")")
        self.s.expect(".")
        self.predicates.append(PredicateSymbol(ident, tuple(params)))

    def _parse_header(self) -> None:
        self.header = self.s.annotation(raw=True).body

    def _parse_footer(self) -> None:
        self.footer = self.s.annotation(raw=True).body

    def _parse_query(self) -> None:
        scope: dict[str, Variable] = {}
        fact = self._parse_fact(scope)
        if not isinstance(fact, Predicate):
            raise ParseError("query must be a predicate fact", self.s.span(self.s.pos))
        self.s.expect(".")
        self.queries.append(Query(fact))

    def _parse_clause(self) -> None:
        label = self.s.string()
        scope: dict[str, Variable] = {}
        hypotheses: list[Fact] = []
        if not self.s.peek("=>"):
            hypotheses.append(self._parse_fact(scope))
            while self.s.accept("&&"):
                hypotheses.append(self._parse_fact(scope))
        self.s.expect("=>")
        conclusion = self._parse_fact(scope)
        if not isinstance(conclusion, Predicate):
            raise ParseError("clause conclusion cannot be a disequality", self.s.span(self.s.pos))
        annotation = None
        if self.s.peek("(**"):
            raw = self.s.annotation(raw=False)
            annotation = self._elaborate_clause_annotation(raw, scope)
        self.s.expect(".")
        self.clauses.append(Clause(label, tuple(hypotheses), conclusion, annotation))

    # -- facts and terms ---------------------------------------------------

    def _parse_fact(self, scope: dict[str, Variable]) -> Fact:
        start = self.s.pos
        first = self._parse_term(scope, expected=None, allow_pred=True)
        if isinstance(first, Predicate):
            return first
        self.s.expect("<>")
        lhs_type = first.type if isinstance(first, (Variable, Name)) else first.symbol.result_type
        rhs = self._parse_term(scope, expected=lhs_type)
        assert not isinstance(rhs, Predicate)
        if isinstance(first, Variable) and first.type == ANY_TYPE:
            raise ParseError("cannot infer type of disequality operand", self.s.span(start))
        return Disequality(first, rhs)

    def _lookup_predicate(self, ident: str) -> Optional[PredicateSymbol]:
        for p in self.predicates:
            if p.id == ident:
                return p
        return None

    def _parse_term(self, scope: dict[str, Variable], expected: Optional[TypeName],
                    allow_pred: bool = False) -> Union[Term, Predicate]:
        start = self.s.pos
        ident = self.s.ident("term")
        span = self.s.span(start, len(ident))
        if self.s.accept("["):
            sig = next((n for n in self.names if n.id == ident), None)
            if sig is None:
                raise ParseError(f"undeclared name {ident!r}", span)
            params: list[Term] = []
            if not self.s.accept("]"):
                for i in range(len(sig.param_types)):
                    if i:
                        self.s.expect(",")
                    t = self._parse_term(scope, expected=sig.param_types[i])
                    assert not isinstance(t, Predicate)
                    params.append(t)
                self.s.expect("]")
            if len(params) != len(sig.param_types):
                raise ParseError(
                    f"name {ident!r} expects {len(sig.param_types)} params, got {len(params)}", span)
            return Name(ident, tuple(params), sig.result_type)
        if self.s.accept("("):
            pred = self._lookup_predicate(ident) if allow_pred else None
            if pred is not None:
                args: list[Term] = []
                if not self.s.accept(")"):
                    for i in range(pred.arity):
                        if i:
                            self.s.expect(",")
                        t = self._parse_term(scope, expected=pred.param_types[i])
                        assert not isinstance(t, Predicate)
                        args.append(t)
                    self.s.expect(")")
                if len(args) != pred.arity:
                    raise ParseError(f"predicate {ident!r} expects {pred.arity} args", span)
                return Predicate(pred, tuple(args))
            args = []
            if not self.s.accept(")"):
                # arity unknown until lookup; parse args with deferred typing
                args.append(self._parse_deferred(scope))
                while self.s.accept(","):
                    args.append(self._parse_deferred(scope))
                self.s.expect(")")
            sym = next((f for f in self.functions
                        if f.id == ident and f.arity == len(args)), None)
            if sym is None:
                raise ParseError(f"undeclared function {ident!r}/{len(args)}", span)
            resolved = tuple(self._resolve_deferred(a, ty, scope, span)
                             for a, ty in zip(args, sym.param_types))
            return FunApp(sym, resolved)
        # bare identifier: 0-ary function, else variable
        sym = next((f for f in self.functions if f.id == ident and f.arity == 0), None)
        if sym is not None:
            return FunApp(sym, ())
        if ident in scope:
            v = scope[ident]
            if expected is not None and v.type != expected:
                raise ParseError(
                    f"variable {ident!r} has type {v.type}, expected {expected}", span)
            return v
        if expected is None:
            raise ParseError(f"cannot infer type of variable {ident!r}", span)
        v = Variable(ident, expected)
        scope[ident] = v
        return v

    # Function application arguments are parsed before the symbol (and thus the
    # expected argument type) is known; new bare variables are deferred.

    def _parse_deferred(self, scope: dict[str, Variable]):
        start = self.s.pos
        save = dict(scope)
        try:
            return self._parse_term(scope, expected=None)
        except ParseError as exc:
            if "cannot infer type" not in exc.diagnostic.message:
                raise
            scope.clear()
            scope.update(save)
            self.s.pos = start
            ident = self.s.ident("term")
            return ("deferred-var", ident, self.s.span(start, len(ident)))

    def _resolve_deferred(self, arg, expected: TypeName, scope: dict[str, Variable],
                          span: SourceSpan) -> Term:
        if isinstance(arg, tuple) and arg and arg[0] == "deferred-var":
            _, ident, vspan = arg
            if ident in scope:
                v = scope[ident]
            else:
                v = Variable(ident, expected)
                scope[ident] = v
            if v.type != expected:
                raise ParseError(f"variable {ident!r} has type {v.type}, expected {expected}", vspan)
            return v
        ty = arg.type if isinstance(arg, (Variable, Name)) else arg.symbol.result_type
        if ty != expected:
            raise ParseError(f"argument {arg} has type {ty}, expected {expected}", span)
        return arg

    # -- annotation elaboration --------------------------------------------

    def _elaborate_clause_annotation(self, raw: RawAnnotation,
                                     scope: dict[str, Variable]) -> ClauseAnnotation:
        segments: list[Union[LiteralSegment, TermHole]] = []
        for is_hole, text, span in _split_holes(raw):
            if not is_hole:
                segments.append(LiteralSegment(text))
                continue
            sub = _Parser.__new__(_Parser)
            sub.__dict__.update(self.__dict__)
            sub.s = _Scanner(text, raw.span.file)
            hole_scope = dict(scope)
            try:
                term = sub._parse_term(hole_scope, expected=None)
            except ParseError as exc:
                msg = exc.diagnostic.message
                if "cannot infer type" in msg:
                    msg = msg.replace("cannot infer type of variable",
                                      "annotation hole references unknown variable")
                raise ParseError(msg, span) from exc
            if not sub.s.at_end():
                raise ParseError(f"trailing input in annotation hole {text!r}", span)
            for v in hole_scope.values():
                if v not in scope.values():
                    raise ParseError(
                        f"annotation hole references unknown variable {v.id!r}", span)
            assert not isinstance(term, Predicate)
            segments.append(TermHole(term))
        return ClauseAnnotation(tuple(segments))

    def _elaborate_fun_annotation(self, raw: RawAnnotation,
                                  arity: int) -> FunctionSymbolAnnotation:
        segments: list[Union[LiteralSegment, IndexHole]] = []
        for is_hole, text, span in _split_holes(raw):
            if not is_hole:
                segments.append(LiteralSegment(text))
                continue
            stripped = text.strip()
            if not stripped.isdigit() or not (1 <= int(stripped) <= arity):
                raise ParseError(
                    f"function annotation hole must be an integer in 1..{arity}, got {text!r}",
                    span)
            segments.append(IndexHole(int(stripped)))
        return FunctionSymbolAnnotation(tuple(segments))


def parse_model(text: str, filename: str = "<string>", name: Optional[str] = None) -> ParseResult:
    """Parse and validate a model. On errors, `model` is None and the
    diagnostics say why; warnings leave the model usable."""
    if name is None:
        stem = filename.rsplit("/", 1)[-1]
        name = stem[:-len(".exthorntype")] if stem.endswith(".exthorntype") else stem
    return _Parser(text, filename, name).run()


# -- printing ---------------------------------------------------------------

_DELIMITER_CANDIDATES = "|@#$%&~^?!"


def _print_term(t: Term) -> str:
    if isinstance(t, Variable):
        return t.id
    if isinstance(t, Name):
        return f"{t.id}[{', '.join(_print_term(p) for p in t.params)}]"
    if not t.args:
        return t.symbol.id
    return f"{t.symbol.id}({', '.join(_print_term(a) for a in t.args)})"


def _print_fact(f: Fact) -> str:
    if isinstance(f, Predicate):
        return f"{f.pred.id}({', '.join(_print_term(a) for a in f.args)})"
    return f"{_print_term(f.lhs)} <> {_print_term(f.rhs)}"


def _escape_body(body: str) -> str:
    return body.replace("*)", "*\\)")


def _print_annotation(segments, render_hole) -> str:
    texts = [seg.text for seg in segments if isinstance(seg, LiteralSegment)]
    holes = [render_hole(seg) for seg in segments if not isinstance(seg, LiteralSegment)]
    for d in _DELIMITER_CANDIDATES:
        if all(d not in t for t in texts + holes):
            delim = d
            break
    else:
        raise ValueError("no usable hole delimiter for annotation")
    body = "".join(
        seg.text if isinstance(seg, LiteralSegment) else delim + render_hole(seg) + delim
        for seg in segments
    )
    return f"(**{delim} {_escape_body(body)} **)"


def print_model(m: Model) -> str:
    """Deterministic pretty-print; parse_model(print_model(m)) round-trips."""
    out: list[str] = [f"// model: {m.name}", ""]
    if m.header is not None:
        out += [f"header (**\n{_escape_body(m.header)}\n**)", ""]
    for t in m.types:
        if t != ANY_TYPE:
            out.append(f"type {t}.")
    for n in m.names:
        out.append(f"name {n.id}[{', '.join(n.param_types)}]: {n.result_type}.")
    for f in m.functions:
        line = f"fun {f.id}({', '.join(f.param_types)}): {f.result_type}"
        if f.annotation is not None:
            line += " " + _print_annotation(
                f.annotation.segments, lambda seg: str(seg.index))
        out.append(line + ".")
    for p in m.predicates:
        out.append(f"pred {p.id}({', '.join(p.param_types)}).")
    out.append("")
    for c in m.clauses:
        body = " && ".join(_print_fact(h) for h in c.hypotheses)
        line = f'clause "{c.label}" {body + " " if body else ""}=> {_print_fact(c.conclusion)}'
        if c.annotation is not None:
            line += "\n  " + _print_annotation(
                c.annotation.segments, lambda seg: _print_term(seg.term))
        out.append(line + ".")
    out.append("")
    for q in m.queries:
        out.append(f"query {_print_fact(q.fact)}.")
    if m.footer is not None:
        out += ["", f"footer (**\n{_escape_body(m.footer)}\n**)"]
    return "\n".join(out) + "\n"
