"""Typed first-order terms: variables, parameterized names, function applications.

Everything here is immutable and pure; substitution, matching and unification
are the primitives the clause engine and the code generator are built on.
Name parameters behave exactly like function arguments during substitution,
matching and unification.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

# The distinguished universal type. Untyped models assign it everywhere,
# which collapses all type checks into trivial equalities.
ANY_TYPE = "any"

TypeName = str


class UnifyError(Exception):
    """No unifier / matcher exists for the given pair of terms."""


@dataclass(frozen=True)
class FunctionSymbol:
    id: str
    param_types: tuple[TypeName, ...]
    result_type: TypeName
    annotation: Optional["object"] = field(default=None, compare=False)

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def __repr__(self) -> str:
        return f"{self.id}/{self.arity}"


@dataclass(frozen=True)
class Variable:
    id: str
    type: TypeName = ANY_TYPE

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class Name:
    id: str
    params: tuple["Term", ...] = ()
    type: TypeName = ANY_TYPE

    def __str__(self) -> str:
        return f"{self.id}[{','.join(map(str, self.params))}]"


@dataclass(frozen=True)
class FunApp:
    symbol: FunctionSymbol
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if len(self.args) != self.symbol.arity:
            raise ValueError(
                f"{self.symbol}: expected {self.symbol.arity} arguments, got {len(self.args)}"
            )

    def __str__(self) -> str:
        if not self.args:
            return self.symbol.id
        return f"{self.symbol.id}({','.join(map(str, self.args))})"


Term = Union[Variable, Name, FunApp]


def term_type(t: Term) -> TypeName:
    if isinstance(t, FunApp):
        return t.symbol.result_type
    return t.type


def subterms(t: Term) -> Iterator[Term]:
    """Yield t and every subterm of t, pre-order."""
    yield t
    if isinstance(t, Name):
        for p in t.params:
            yield from subterms(p)
    elif isinstance(t, FunApp):
        for a in t.args:
            yield from subterms(a)


def variables_of(t: Term) -> set[Variable]:
    return {s for s in subterms(t) if isinstance(s, Variable)}


def is_closed(t: Term) -> bool:
    """True iff no variable occurs anywhere in t, including name parameters."""
    return not any(isinstance(s, Variable) for s in subterms(t))


def term_depth(t: Term) -> int:
    if isinstance(t, Variable):
        return 1
    children = t.params if isinstance(t, Name) else t.args
    if not children:
        return 1
    return 1 + max(term_depth(c) for c in children)


@dataclass(frozen=True)
class Substitution:
    """A finite map from variables to terms, normalized to idempotent form.

    Normalization resolves chains (x -> y, y -> t becomes x -> t, y -> t) so
    that applying twice equals applying once; identity bindings are dropped.
    Construction rejects ill-typed bindings.
    """

    bindings: tuple[tuple[Variable, Term], ...]

    @staticmethod
    def of(mapping: dict[Variable, Term]) -> "Substitution":
        for v, t in mapping.items():
            if term_type(t) != v.type:
                raise ValueError(f"ill-typed binding {v}:{v.type} -> {t}:{term_type(t)}")
        normalized = dict(mapping)
        changed, rounds = True, 0
        while changed:
            if rounds > len(normalized) + 1:
                raise ValueError(f"cyclic substitution: {mapping}")
            changed, rounds = False, rounds + 1
            for v, t in list(normalized.items()):
                t2 = _apply_map(normalized, t)
                if t2 != t:
                    normalized[v] = t2
                    changed = True
        items = tuple(sorted(
            ((v, t) for v, t in normalized.items() if t != v),
            key=lambda item: (item[0].id, item[0].type),
        ))
        return Substitution(items)

    def as_dict(self) -> dict[Variable, Term]:
        return dict(self.bindings)

    def domain(self) -> set[Variable]:
        return {v for v, _ in self.bindings}

    def compose(self, other: "Substitution") -> "Substitution":
        """self then other: apply(result, t) == apply(other, apply(self, t))."""
        merged = {v: apply(other, t) for v, t in self.bindings}
        for v, t in other.bindings:
            merged.setdefault(v, t)
        return Substitution.of(merged)

    def restrict(self, vs: set[Variable]) -> "Substitution":
        return Substitution.of({v: t for v, t in self.bindings if v in vs})

    def __str__(self) -> str:
        inner = ", ".join(f"{v} -> {t}" for v, t in self.bindings)
        return "{" + inner + "}"


EMPTY_SUBSTITUTION = Substitution(())


def _apply_map(mapping: dict[Variable, Term], t: Term) -> Term:
    if isinstance(t, Variable):
        return mapping.get(t, t)
    if isinstance(t, Name):
        if not t.params:
            return t
        return Name(t.id, tuple(_apply_map(mapping, p) for p in t.params), t.type)
    return FunApp(t.symbol, tuple(_apply_map(mapping, a) for a in t.args))


def apply(sub: Substitution, t: Term) -> Term:
    """Replace every bound variable in t, recursively (name params included)."""
    if not sub.bindings:
        return t
    return _apply_map(sub.as_dict(), t)


def _children(t: Term) -> tuple[Term, ...]:
    return t.params if isinstance(t, Name) else t.args


def _same_head(t1: Term, t2: Term) -> bool:
    if isinstance(t1, Name) and isinstance(t2, Name):
        return t1.id == t2.id and t1.type == t2.type and len(t1.params) == len(t2.params)
    if isinstance(t1, FunApp) and isinstance(t2, FunApp):
        return t1.symbol == t2.symbol
    return False


def unify(t1: Term, t2: Term) -> Substitution:
    """Most general unifier of t1 and t2, with occurs-check.

    Raises UnifyError on symbol clash, type clash or occurs-check failure.
    """
    bindings: dict[Variable, Term] = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Variable) and t in bindings:
            t = bindings[t]
        return t

    def occurs(v: Variable, t: Term) -> bool:
        t = walk(t)
        if isinstance(t, Variable):
            return t == v
        return any(occurs(v, c) for c in _children(t))

    def go(a: Term, b: Term) -> None:
        a, b = walk(a), walk(b)
        if a == b:
            return
        if isinstance(a, Variable):
            if term_type(b) != a.type:
                raise UnifyError(f"type clash: {a}:{a.type} vs {b}:{term_type(b)}")
            if occurs(a, b):
                raise UnifyError(f"occurs-check: {a} in {b}")
            bindings[a] = b
            return
        if isinstance(b, Variable):
            go(b, a)
            return
        if not _same_head(a, b):
            raise UnifyError(f"symbol clash: {a} vs {b}")
        for ca, cb in zip(_children(a), _children(b)):
            go(ca, cb)

    go(t1, t2)
    return Substitution.of(bindings)


def match(pattern: Term, target: Term, frozen: Optional[set[Variable]] = None) -> Substitution:
    """One-sided unification: find sub with apply(sub, pattern) == target.

    Variables are only bound on the pattern side; variables of `frozen` (and
    all variables occurring in `target`) are treated as constants. Raises
    UnifyError when no such substitution exists.
    """
    frozen = (frozen or set()) | variables_of(target)
    bindings: dict[Variable, Term] = {}

    def go(p: Term, t: Term) -> None:
        if isinstance(p, Variable) and p not in frozen:
            if term_type(t) != p.type:
                raise UnifyError(f"type clash: {p}:{p.type} vs {t}:{term_type(t)}")
            bound = bindings.setdefault(p, t)
            if bound != t:
                raise UnifyError(f"conflicting bindings for {p}: {bound} vs {t}")
            return
        if p == t:
            return
        if not _same_head(p, t):
            raise UnifyError(f"no match: {p} vs {t}")
        for cp, ct in zip(_children(p), _children(t)):
            go(cp, ct)

    go(pattern, target)
    return Substitution.of(bindings)


def rename_apart(t: Term, suffix: str) -> Term:
    """Append suffix to every variable id in t (used to keep clause copies disjoint)."""
    mapping = {v: Variable(v.id + suffix, v.type) for v in variables_of(t)}
    return _apply_map(mapping, t)
