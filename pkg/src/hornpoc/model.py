"""Facts, clauses, queries, code-template annotations and the model container."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .terms import (
    ANY_TYPE,
    FunctionSymbol,
    Name,
    Substitution,
    Term,
    TypeName,
    UnifyError,
    Variable,
    apply,
    match,
    term_type,
    variables_of,
)

RESERVED_PREDICATES = ("iknows", "storedkey", "exportable", "iauth")


@dataclass(frozen=True)
class PredicateSymbol:
    id: str
    param_types: tuple[TypeName, ...]

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def __repr__(self) -> str:
        return f"{self.id}/{self.arity}"


@dataclass(frozen=True)
class Predicate:
    pred: PredicateSymbol
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.args) != self.pred.arity:
            raise ValueError(f"{self.pred}: expected {self.pred.arity} args, got {len(self.args)}")

    def __str__(self) -> str:
        return f"{self.pred.id}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Disequality:
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs} <> {self.rhs}"


Fact = Union[Predicate, Disequality]


def fact_terms(f: Fact) -> tuple[Term, ...]:
    if isinstance(f, Predicate):
        return f.args
    return (f.lhs, f.rhs)


def fact_variables(f: Fact) -> set[Variable]:
    out: set[Variable] = set()
    for t in fact_terms(f):
        out |= variables_of(t)
    return out


def fact_is_closed(f: Fact) -> bool:
    return not fact_variables(f)


def apply_fact(sub: Substitution, f: Fact) -> Fact:
    if isinstance(f, Predicate):
        return Predicate(f.pred, tuple(apply(sub, a) for a in f.args))
    return Disequality(apply(sub, f.lhs), apply(sub, f.rhs))


# --- annotations ---------------------------------------------------------


@dataclass(frozen=True)
class LiteralSegment:
    text: str


@dataclass(frozen=True)
class TermHole:
    term: Term


@dataclass(frozen=True)
class IndexHole:
    index: int  # 1-based argument position


@dataclass(frozen=True)
class ClauseAnnotation:
    segments: tuple[Union[LiteralSegment, TermHole], ...]


@dataclass(frozen=True)
class FunctionSymbolAnnotation:
    segments: tuple[Union[LiteralSegment, IndexHole], ...]


# --- clauses, queries, model ---------------------------------------------


@dataclass(frozen=True)
class Clause:
    label: str
    hypotheses: tuple[Fact, ...]  # a multiset; duplicates are meaningful
    conclusion: Predicate
    annotation: Optional[ClauseAnnotation] = None

    def predicate_hypotheses(self) -> tuple[Predicate, ...]:
        return tuple(h for h in self.hypotheses if isinstance(h, Predicate))

    def disequality_hypotheses(self) -> tuple[Disequality, ...]:
        return tuple(h for h in self.hypotheses if isinstance(h, Disequality))

    def variables(self) -> set[Variable]:
        out = fact_variables(self.conclusion)
        for h in self.hypotheses:
            out |= fact_variables(h)
        return out

    def __str__(self) -> str:
        if not self.hypotheses:
            return f"=> {self.conclusion}"
        return " && ".join(map(str, self.hypotheses)) + f" => {self.conclusion}"


@dataclass(frozen=True)
class NameSignature:
    id: str
    param_types: tuple[TypeName, ...]
    result_type: TypeName


@dataclass(frozen=True)
class Query:
    fact: Predicate

    def __str__(self) -> str:
        return str(self.fact)


@dataclass(frozen=True)
class Model:
    name: str
    types: tuple[TypeName, ...]
    functions: tuple[FunctionSymbol, ...]
    predicates: tuple[PredicateSymbol, ...]
    names: tuple[NameSignature, ...]
    clauses: tuple[Clause, ...]
    queries: tuple[Query, ...]
    header: Optional[str] = None
    footer: Optional[str] = None

    def function(self, id: str, arity: int) -> Optional[FunctionSymbol]:
        for f in self.functions:
            if f.id == id and f.arity == arity:
                return f
        return None

    def predicate(self, id: str) -> Optional[PredicateSymbol]:
        for p in self.predicates:
            if p.id == id:
                return p
        return None

    def name_signature(self, id: str) -> Optional[NameSignature]:
        for n in self.names:
            if n.id == id:
                return n
        return None

    def clause(self, label: str) -> Clause:
        for c in self.clauses:
            if c.label == label:
                return c
        raise KeyError(label)


# --- diagnostics ----------------------------------------------------------


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int  # 1-based
    column: int  # 1-based
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity.value}: {self.message}"


def errors(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity is Severity.ERROR]


# --- subsumption ----------------------------------------------------------


def subsumes(r1: Clause, r2: Clause) -> Substitution:
    """Find sub with sub(r1.conclusion) == r2.conclusion and sub(r1.hypotheses)
    a sub-multiset of r2.hypotheses.

    r2's variables are treated as constants. The search over hypothesis
    injections is exhaustive with backtracking; raises UnifyError when r1
    does not subsume r2.
    """
    frozen = r2.variables()

    def match_fact(pattern: Fact, target: Fact, base: dict[Variable, Term]) -> Optional[dict[Variable, Term]]:
        if isinstance(pattern, Predicate) != isinstance(target, Predicate):
            return None
        if isinstance(pattern, Predicate) and pattern.pred != target.pred:
            return None
        out = dict(base)
        for pt, tt in zip(fact_terms(pattern), fact_terms(target)):
            try:
                sub = match(apply(Substitution.of(out), pt), tt, frozen=frozen)
            except (UnifyError, ValueError):
                return None
            for v, t in sub.bindings:
                if out.setdefault(v, t) != t:
                    return None
        return out

    base = match_fact(r1.conclusion, r2.conclusion, {})
    if base is None:
        raise UnifyError(f"conclusion of {r1.label!r} does not match")

    targets = list(r2.hypotheses)

    def place(i: int, bound: dict[Variable, Term], used: set[int]) -> Optional[dict[Variable, Term]]:
        if i == len(r1.hypotheses):
            return bound
        for j, target in enumerate(targets):
            if j in used:
                continue
            extended = match_fact(r1.hypotheses[i], target, bound)
            if extended is None:
                continue
            result = place(i + 1, extended, used | {j})
            if result is not None:
                return result
        return None

    final = place(0, base, set())
    if final is None:
        raise UnifyError(f"hypotheses of {r1.label!r} do not embed")
    return Substitution.of(final)


# --- validation -----------------------------------------------------------


def _check_term(m: Model, t: Term, diags: list[Diagnostic], where: str) -> None:
    if isinstance(t, Variable):
        return
    if isinstance(t, Name):
        sig = m.name_signature(t.id)
        if sig is None:
            diags.append(Diagnostic(Severity.ERROR, f"{where}: undeclared name {t.id!r}"))
        else:
            if len(t.params) != len(sig.param_types):
                diags.append(Diagnostic(
                    Severity.ERROR,
                    f"{where}: name {t.id!r} expects {len(sig.param_types)} params, got {len(t.params)}",
                ))
            else:
                for p, ty in zip(t.params, sig.param_types):
                    if term_type(p) != ty:
                        diags.append(Diagnostic(
                            Severity.ERROR,
                            f"{where}: name {t.id!r} param {p} has type {term_type(p)}, expected {ty}",
                        ))
            if t.type != sig.result_type:
                diags.append(Diagnostic(
                    Severity.ERROR, f"{where}: name {t.id!r} has type {t.type}, declared {sig.result_type}"
                ))
        for p in t.params:
            _check_term(m, p, diags, where)
        return
    if m.function(t.symbol.id, t.symbol.arity) != t.symbol:
        diags.append(Diagnostic(Severity.ERROR, f"{where}: undeclared function {t.symbol!r}"))
    for a, ty in zip(t.args, t.symbol.param_types):
        if term_type(a) != ty:
            diags.append(Diagnostic(
                Severity.ERROR,
                f"{where}: argument {a} of {t.symbol.id!r} has type {term_type(a)}, expected {ty}",
            ))
        _check_term(m, a, diags, where)


def _check_fact(m: Model, f: Fact, diags: list[Diagnostic], where: str) -> None:
    if isinstance(f, Predicate):
        if m.predicate(f.pred.id) != f.pred:
            diags.append(Diagnostic(Severity.ERROR, f"{where}: undeclared predicate {f.pred!r}"))
        for a, ty in zip(f.args, f.pred.param_types):
            if term_type(a) != ty:
                diags.append(Diagnostic(
                    Severity.ERROR,
                    f"{where}: argument {a} of {f.pred.id!r} has type {term_type(a)}, expected {ty}",
                ))
            _check_term(m, a, diags, where)
    else:
        if term_type(f.lhs) != term_type(f.rhs):
            diags.append(Diagnostic(Severity.ERROR, f"{where}: disequality between distinct types"))
        _check_term(m, f.lhs, diags, where)
        _check_term(m, f.rhs, diags, where)


def _lint_exempt(var: Variable, conclusion: Predicate) -> bool:
    """True when var occurs in the conclusion only inside a name's parameters."""
    def bare_occurrence(t: Term, inside_name: bool) -> bool:
        if isinstance(t, Variable):
            return t == var and not inside_name
        if isinstance(t, Name):
            return any(bare_occurrence(p, True) for p in t.params)
        return any(bare_occurrence(a, inside_name) for a in t.args)

    return not any(bare_occurrence(a, False) for a in conclusion.args)


def validate(m: Model) -> list[Diagnostic]:
    """Resolution and typing errors, plus the conclusion-variable warning.

    The warning flags clauses whose conclusion contains a variable bound by
    no hypothesis (unless it only occurs inside a name's parameters); such
    variables are instantiated with fresh names during search, which is
    rarely what the modeler wants.
    """
    diags: list[Diagnostic] = []
    if ANY_TYPE not in m.types:
        diags.append(Diagnostic(Severity.ERROR, f"universal type {ANY_TYPE!r} missing"))
    for group, key in ((m.types, lambda t: t), (m.predicates, lambda p: p.id),
                       (m.names, lambda n: n.id), (m.functions, lambda f: (f.id, f.arity))):
        seen = set()
        for item in group:
            k = key(item)
            if k in seen:
                diags.append(Diagnostic(Severity.ERROR, f"duplicate declaration {k!r}"))
            seen.add(k)

    labels = set()
    for c in m.clauses:
        where = f"clause {c.label!r}"
        if c.label in labels:
            diags.append(Diagnostic(Severity.ERROR, f"duplicate clause label {c.label!r}"))
        labels.add(c.label)
        for h in c.hypotheses:
            _check_fact(m, h, diags, where)
        _check_fact(m, c.conclusion, diags, where)

        hyp_vars: set[Variable] = set()
        for h in c.hypotheses:
            hyp_vars |= fact_variables(h)
        for v in sorted(fact_variables(c.conclusion) - hyp_vars, key=lambda v: v.id):
            if not _lint_exempt(v, c.conclusion):
                diags.append(Diagnostic(
                    Severity.WARNING,
                    f"{where}: conclusion variable {v.id!r} does not occur in any hypothesis",
                ))

        if c.annotation is not None:
            clause_vars = c.variables()
            for seg in c.annotation.segments:
                if isinstance(seg, TermHole):
                    for v in sorted(variables_of(seg.term), key=lambda v: v.id):
                        if v not in clause_vars:
                            diags.append(Diagnostic(
                                Severity.ERROR,
                                f"{where}: annotation hole references foreign variable {v.id!r}",
                            ))
                    _check_term(m, seg.term, diags, f"{where} annotation")

    for f in m.functions:
        if f.annotation is not None:
            for seg in f.annotation.segments:
                if isinstance(seg, IndexHole) and not (1 <= seg.index <= f.arity):
                    diags.append(Diagnostic(
                        Severity.ERROR,
                        f"function {f.id!r}: annotation index {seg.index} out of range 1..{f.arity}",
                    ))

    for q in m.queries:
        _check_fact(m, q.fact, diags, f"query {q}")
    return diags
