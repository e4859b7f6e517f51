"""Bounded attack search: derivability of query facts with tree witnesses.

The search is goal-directed backward chaining with iterative deepening on
tree depth. Clause order breaks ties, premises are explored left to right,
and failed (goal, depth) pairs are memoized, so results are deterministic.
`oracle_derivable` is an independent ground forward-chaining fixpoint used
to cross-check the search in tests.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .model import (
    Clause,
    Diagnostic,
    Disequality,
    Fact,
    Model,
    Predicate,
    Query,
    Severity,
    apply_fact,
    fact_is_closed,
    fact_variables,
    subsumes,
)
from .terms import (
    EMPTY_SUBSTITUTION,
    FunApp,
    Name,
    Substitution,
    Term,
    UnifyError,
    Variable,
    apply,
    is_closed,
    term_depth,
    term_type,
    unify,
)


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 12
    max_nodes: int = 100_000
    timeout_ms: int = 300_000

    def __post_init__(self) -> None:
        if self.max_depth <= 0 or self.max_nodes <= 0 or self.timeout_ms <= 0:
            raise ValueError("search budget bounds must be positive")


@dataclass(frozen=True)
class DerivationNode:
    clause: Clause
    sub: Substitution
    conclusion_label: Fact
    premise_labels: tuple[Fact, ...]
    children: tuple["DerivationNode", ...]

    def walk(self) -> Iterator["DerivationNode"]:
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass(frozen=True)
class DerivationTree:
    root_fact: Fact
    subroot: DerivationNode

    def nodes(self) -> Iterator[DerivationNode]:
        return self.subroot.walk()

    def annotated_step_count(self) -> int:
        return sum(1 for n in self.nodes() if n.clause.annotation is not None)


class DeriveStatus(Enum):
    ATTACK = "attack"
    NOT_FOUND = "not-found"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class DeriveResult:
    status: DeriveStatus
    tree: Optional[DerivationTree]
    depth: int
    nodes_expanded: int
    elapsed_ms: float
    warnings: tuple[str, ...] = ()


class SearchError(Exception):
    """Model misuse discovered mid-search (e.g. a non-ground disequality)."""


class _Exhausted(Exception):
    pass


# -- internal search structures ---------------------------------------------


@dataclass
class _Proto:
    clause: Clause
    renaming: dict[Variable, Variable]
    conclusion: Fact  # renamed, possibly open
    premises: tuple[Fact, ...]  # renamed predicate hypotheses, in clause order
    disequalities: tuple[Disequality, ...]
    children: list["_Proto"]


def _canonical(f: Predicate) -> tuple:
    order: dict[Variable, int] = {}

    def go(t: Term):
        if isinstance(t, Variable):
            idx = order.setdefault(t, len(order))
            return ("v", idx, t.type)
        if isinstance(t, Name):
            return ("n", t.id, t.type, tuple(go(p) for p in t.params))
        return ("f", t.symbol.id, t.symbol.arity, tuple(go(a) for a in t.args))

    return (f.pred.id, tuple(go(a) for a in f.args))


def _unify_predicates(p1: Predicate, p2: Predicate) -> Substitution:
    if p1.pred != p2.pred:
        raise UnifyError(f"predicate clash: {p1.pred} vs {p2.pred}")
    sub = EMPTY_SUBSTITUTION
    for a1, a2 in zip(p1.args, p2.args):
        sub = sub.compose(unify(apply(sub, a1), apply(sub, a2)))
    return sub


class _Search:
    def __init__(self, m: Model, budget: SearchBudget):
        self.model = m
        self.budget = budget
        self.rename_counter = 0
        self.nodes_expanded = 0
        self.started = time.monotonic()
        self.depth_cut = False
        # canonical goal -> (max depth failed at, failure involved a depth cut)
        self.failed: dict[tuple, tuple[int, bool]] = {}

    def _tick(self) -> None:
        self.nodes_expanded += 1
        if self.nodes_expanded > self.budget.max_nodes:
            raise _Exhausted("node budget")
        if self.nodes_expanded % 256 == 0:
            if (time.monotonic() - self.started) * 1000 > self.budget.timeout_ms:
                raise _Exhausted("timeout")

    def _rename_clause(self, c: Clause) -> _Proto:
        self.rename_counter += 1
        suffix = self.rename_counter
        renaming = {v: Variable(f"{v.id}#{suffix}", v.type) for v in sorted(c.variables(), key=lambda v: v.id)}
        sub = Substitution.of({v: rv for v, rv in renaming.items()})
        return _Proto(
            clause=c,
            renaming=renaming,
            conclusion=apply_fact(sub, c.conclusion),
            premises=tuple(apply_fact(sub, h) for h in c.predicate_hypotheses()),
            disequalities=tuple(apply_fact(sub, d) for d in c.disequality_hypotheses()),
            children=[],
        )

    def solve(self, goal: Predicate, depth: int) -> Iterator[tuple[Substitution, _Proto]]:
        """Yield (accumulated substitution, proof skeleton) for every way of
        deriving an instance of goal with a tree of depth <= depth."""
        key = _canonical(goal)
        cached = self.failed.get(key)
        if cached is not None and cached[0] >= depth:
            if cached[1]:
                self.depth_cut = True
            return
        cut_before = self.depth_cut
        self.depth_cut = False
        yielded = False
        try:
            for clause in self.model.clauses:
                self._tick()
                proto = self._rename_clause(clause)
                assert isinstance(proto.conclusion, Predicate)
                try:
                    sigma = _unify_predicates(proto.conclusion, goal)
                except UnifyError:
                    continue
                if proto.premises and depth <= 1:
                    self.depth_cut = True
                    continue
                for sub, children in self._solve_premises(proto.premises, 0, sigma, depth - 1):
                    ok = True
                    for d in proto.disequalities:
                        ground = apply_fact(sub, d)
                        assert isinstance(ground, Disequality)
                        if not is_closed(ground.lhs) or not is_closed(ground.rhs):
                            raise SearchError(
                                f"clause {clause.label!r}: disequality {ground} not ground at "
                                "node completion")
                        if ground.lhs == ground.rhs:
                            ok = False
                            break
                    if not ok:
                        continue
                    proto.children = children
                    yielded = True
                    yield sub, proto
        finally:
            if not yielded:
                prev = self.failed.get(key, (0, False))
                if depth >= prev[0]:
                    self.failed[key] = (depth, self.depth_cut)
            self.depth_cut = self.depth_cut or cut_before

    def _solve_premises(self, premises: tuple[Fact, ...], i: int, sub: Substitution,
                        depth: int) -> Iterator[tuple[Substitution, list[_Proto]]]:
        if i == len(premises):
            yield sub, []
            return
        goal = apply_fact(sub, premises[i])
        assert isinstance(goal, Predicate)
        for s2, child in self.solve(goal, depth):
            for s3, rest in self._solve_premises(premises, i + 1, sub.compose(s2), depth):
                yield s3, [child] + rest


def _finalize(goal: Predicate, sub: Substitution, proto: _Proto) -> tuple[DerivationTree, tuple[str, ...]]:
    """Close any leftover variables with fresh names and build the tree."""
    open_vars: list[Variable] = []

    def collect(p: _Proto) -> None:
        for f in (p.conclusion, *p.premises):
            for v in sorted(fact_variables(apply_fact(sub, f)), key=lambda v: v.id):
                if v not in open_vars:
                    open_vars.append(v)
        for c in p.children:
            collect(c)

    for v in sorted(fact_variables(apply_fact(sub, goal)), key=lambda v: v.id):
        open_vars.append(v)
    collect(proto)

    warnings: tuple[str, ...] = ()
    if open_vars:
        fresh = Substitution.of({
            v: Name(f"~fresh{i + 1}", (), v.type) for i, v in enumerate(open_vars)
        })
        sub = sub.compose(fresh)
        warnings = tuple(
            f"variable left open by search bound to fresh name: {v.id}:{v.type}"
            for v in open_vars
        )

    def build(p: _Proto) -> DerivationNode:
        node_sub = Substitution.of({
            v: apply(sub, rv) for v, rv in p.renaming.items()
        })
        return DerivationNode(
            clause=p.clause,
            sub=node_sub,
            conclusion_label=apply_fact(sub, p.conclusion),
            premise_labels=tuple(apply_fact(sub, h) for h in p.premises),
            children=tuple(build(c) for c in p.children),
        )

    return DerivationTree(apply_fact(sub, goal), build(proto)), warnings


def derive(m: Model, q: Query, budget: SearchBudget = SearchBudget()) -> DeriveResult:
    """Search for a derivation of an instance of q.fact from m's clauses.

    NOT_FOUND is only reported when the search space was provably exhausted
    (no branch was pruned by the depth bound); otherwise a hit bound yields
    BUDGET_EXHAUSTED.
    """
    search = _Search(m, budget)
    exhausted = False
    try:
        for depth in range(1, budget.max_depth + 1):
            search.depth_cut = False
            for sub, proto in search.solve(q.fact, depth):
                tree, warnings = _finalize(q.fact, sub, proto)
                elapsed = (time.monotonic() - search.started) * 1000
                return DeriveResult(DeriveStatus.ATTACK, tree, depth,
                                    search.nodes_expanded, elapsed, warnings)
            if not search.depth_cut:
                elapsed = (time.monotonic() - search.started) * 1000
                return DeriveResult(DeriveStatus.NOT_FOUND, None, depth,
                                    search.nodes_expanded, elapsed)
    except _Exhausted:
        exhausted = True
    elapsed = (time.monotonic() - search.started) * 1000
    status = DeriveStatus.BUDGET_EXHAUSTED if exhausted or search.depth_cut else DeriveStatus.NOT_FOUND
    return DeriveResult(status, None, budget.max_depth, search.nodes_expanded, elapsed)


# -- tree checking -----------------------------------------------------------


def check_tree(m: Model, t: DerivationTree) -> list[Diagnostic]:
    """Independently re-verify every derivation tree invariant."""
    diags: list[Diagnostic] = []

    def err(msg: str) -> None:
        diags.append(Diagnostic(Severity.ERROR, msg))

    if t.subroot.conclusion_label != t.root_fact:
        err(f"root edge {t.root_fact} does not match subroot conclusion "
            f"{t.subroot.conclusion_label}")

    for idx, node in enumerate(t.nodes(), start=1):
        where = f"node {idx} ({node.clause.label!r})"
        if node.clause not in m.clauses:
            err(f"{where}: clause is not part of the model")
        for label in (node.conclusion_label, *node.premise_labels):
            if not fact_is_closed(label):
                err(f"{where}: edge label {label} is not closed")
        if len(node.children) != len(node.premise_labels):
            err(f"{where}: {len(node.premise_labels)} premises but "
                f"{len(node.children)} children")
        for i, (child, label) in enumerate(zip(node.children, node.premise_labels)):
            if child.conclusion_label != label:
                err(f"{where}: child {i} concludes {child.conclusion_label}, "
                    f"edge says {label}")
        # local subsumption, witnessed by the node's substitution
        if apply_fact(node.sub, node.clause.conclusion) != node.conclusion_label:
            err(f"{where}: substitution does not map the conclusion onto its label")
        remaining = list(node.premise_labels)
        for h in node.clause.predicate_hypotheses():
            inst = apply_fact(node.sub, h)
            if inst in remaining:
                remaining.remove(inst)
            else:
                err(f"{where}: instantiated hypothesis {inst} missing from premise labels")
        ground_diseqs = tuple(
            apply_fact(node.sub, d) for d in node.clause.disequality_hypotheses())
        try:
            subsumes(node.clause, Clause("_check", node.premise_labels + ground_diseqs,
                                         node.conclusion_label))  # type: ignore[arg-type]
        except UnifyError:
            err(f"{where}: clause does not subsume the local ground rule")
        for d in node.clause.disequality_hypotheses():
            ground = apply_fact(node.sub, d)
            assert isinstance(ground, Disequality)
            if not fact_is_closed(ground):
                err(f"{where}: disequality {ground} not ground")
            elif ground.lhs == ground.rhs:
                err(f"{where}: disequality {ground} violated")
    return diags


# -- brute-force oracle -------------------------------------------------------


class OracleOverflow(Exception):
    """The depth-bounded Herbrand universe exceeded the configured cardinality."""


def bounded_universe(m: Model, depth: int, max_terms: int = 100_000) -> dict[str, list[Term]]:
    """All ground terms of depth <= depth over m's names and functions, by type."""
    by_type: dict[str, list[Term]] = {t: [] for t in m.types}
    seen: set[Term] = set()
    total = 0

    def add(t: Term) -> bool:
        nonlocal total
        if t in seen:
            return False
        seen.add(t)
        by_type[term_type(t)].append(t)
        total += 1
        if total > max_terms:
            raise OracleOverflow(f"bounded universe exceeds {max_terms} terms")
        return True

    for _ in range(depth):
        grew = False
        for sig in m.names:
            pools = [by_type.get(pt, []) for pt in sig.param_types]
            for combo in itertools.product(*pools):
                t = Name(sig.id, tuple(combo), sig.result_type)
                if term_depth(t) <= depth and add(t):
                    grew = True
        for f in m.functions:
            pools = [by_type.get(pt, []) for pt in f.param_types]
            for combo in itertools.product(*pools):
                t = FunApp(f, tuple(combo))
                if term_depth(t) <= depth and add(t):
                    grew = True
        if not grew:
            break
    return by_type


def _match_ground_predicate(pattern: Predicate, fact: Predicate,
                            base: dict[Variable, Term]) -> Optional[dict[Variable, Term]]:
    if pattern.pred != fact.pred:
        return None
    out = dict(base)

    def go(p: Term, t: Term) -> bool:
        if isinstance(p, Variable):
            if term_type(t) != p.type:
                return False
            bound = out.setdefault(p, t)
            return bound == t
        if isinstance(p, Name) and isinstance(t, Name):
            if p.id != t.id or p.type != t.type or len(p.params) != len(t.params):
                return False
            return all(go(a, b) for a, b in zip(p.params, t.params))
        if type(p) is type(t) and not isinstance(p, Name):
            if p.symbol != t.symbol:  # type: ignore[union-attr]
                return False
            return all(go(a, b) for a, b in zip(p.args, t.args))  # type: ignore[union-attr]
        return False

    for pa, fa in zip(pattern.args, fact.args):
        if not go(pa, fa):
            return None
    return out


def oracle_fixpoint(m: Model, depth: int, max_terms: int = 100_000,
                    max_facts: int = 200_000) -> tuple[set[Predicate], int]:
    """Least fixpoint of ground forward chaining over the bounded universe.

    Returns (facts, number of iterations to saturation). Test-only oracle:
    exhaustive and slow by design, sharing no code path with `derive`.
    """
    universe = bounded_universe(m, depth, max_terms)
    facts: set[Predicate] = set()
    by_pred: dict[str, list[Predicate]] = {}

    def assignments(hyps: tuple[Predicate, ...], i: int,
                    bound: dict[Variable, Term]) -> Iterator[dict[Variable, Term]]:
        if i == len(hyps):
            yield bound
            return
        for fact in by_pred.get(hyps[i].pred.id, []):
            nxt = _match_ground_predicate(hyps[i], fact, bound)
            if nxt is not None:
                yield from assignments(hyps, i + 1, nxt)

    iterations = 0
    changed = True
    while changed:
        changed = False
        iterations += 1
        new_facts: list[Predicate] = []
        for clause in m.clauses:
            hyps = clause.predicate_hypotheses()
            for bound in assignments(hyps, 0, {}):
                free = sorted(
                    (clause.variables() - set(bound)), key=lambda v: v.id)
                pools = [universe.get(v.type, []) for v in free]
                for combo in itertools.product(*pools):
                    full = dict(bound)
                    full.update(zip(free, combo))
                    sub = Substitution.of(full)
                    ok = True
                    for d in clause.disequality_hypotheses():
                        g = apply_fact(sub, d)
                        assert isinstance(g, Disequality)
                        if g.lhs == g.rhs:
                            ok = False
                            break
                    if not ok:
                        continue
                    concl = apply_fact(sub, clause.conclusion)
                    assert isinstance(concl, Predicate)
                    if any(term_depth(t) > depth for t in concl.args):
                        continue
                    if concl not in facts:
                        new_facts.append(concl)
        for f in new_facts:
            if f not in facts:
                facts.add(f)
                by_pred.setdefault(f.pred.id, []).append(f)
                changed = True
                if len(facts) > max_facts:
                    raise OracleOverflow(f"fact set exceeds {max_facts}")
    return facts, iterations


def oracle_derivable(m: Model, f: Fact, depth: int, max_terms: int = 100_000) -> bool:
    if not fact_is_closed(f):
        raise ValueError("oracle only decides closed facts")
    facts, _ = oracle_fixpoint(m, depth, max_terms)
    return f in facts


# -- derivation dump ----------------------------------------------------------


def dump_tree(t: DerivationTree) -> str:
    """Deterministic human-readable serialization, for debugging and goldens."""
    lines = [f"derivation of {t.root_fact}"]
    counter = itertools.count(1)

    def go(node: DerivationNode, indent: int) -> None:
        nid = next(counter)
        pad = "  " * indent
        lines.append(f'{pad}node {nid}: clause "{node.clause.label}" sub {node.sub}')
        lines.append(f"{pad}  concludes {node.conclusion_label}")
        for label, child in zip(node.premise_labels, node.children):
            lines.append(f"{pad}  premise {label}")
            go(child, indent + 2)

    go(t.subroot, 0)
    return "\n".join(lines) + "\n"
