import dataclasses

import pytest

from hornpoc.engine import (
    DeriveStatus,
    OracleOverflow,
    SearchBudget,
    SearchError,
    bounded_universe,
    check_tree,
    derive,
    dump_tree,
    oracle_derivable,
    oracle_fixpoint,
)
from hornpoc.model import (
    Clause,
    Disequality,
    Model,
    NameSignature,
    Predicate,
    PredicateSymbol,
    Query,
)
from hornpoc.terms import ANY_TYPE, Name, Substitution, Variable


def q(model, label):
    """The model's first query, or a fresh ground query by predicate label."""
    return model.queries[0] if label is None else label


def ik(model, term):
    return Predicate(model.predicate("iknows"), (term,))


KEY1 = Name("key1", (), "key")
KEY2 = Name("key2", (), "key")
HANDLE1 = Name("handle1", (), "hdl")


def test_budget_rejects_nonpositive_bounds():
    with pytest.raises(ValueError):
        SearchBudget(max_depth=0)


def test_running_example_attack(running_example):
    m = running_example
    r = derive(m, m.queries[0])
    assert r.status is DeriveStatus.ATTACK
    assert r.depth == 4
    root = r.tree.subroot
    assert root.clause.label == "decrypt wrap"
    assert root.sub == Substitution.of({
        Variable("k1", "key"): KEY2, Variable("k2", "key"): KEY1})
    assert r.tree.root_fact == ik(m, KEY1)
    assert r.tree.annotated_step_count() == 3
    assert any("fresh name" in w for w in r.warnings)
    assert check_tree(m, r.tree) == []


def test_initial_fact_gives_single_node_tree(running_example):
    m = running_example
    goal = Predicate(m.predicate("exportable"), (HANDLE1,))
    r = derive(m, Query(goal))
    assert r.status is DeriveStatus.ATTACK
    assert r.depth == 1
    assert r.tree.subroot.children == ()
    assert r.tree.subroot.conclusion_label == goal
    assert check_tree(m, r.tree) == []


def test_unreachable_goal_is_not_found(running_example):
    m = running_example
    # no clause concludes a non-wrapkey storedkey for key2
    goal = Predicate(m.predicate("storedkey"),
                     (HANDLE1, KEY2, m.clauses[0].conclusion.args[2]))
    r = derive(m, Query(goal))
    assert r.status is DeriveStatus.NOT_FOUND
    assert r.tree is None


def test_recursive_model_exhausts_budget_instead_of_not_found(running_example):
    m = running_example
    pruned = dataclasses.replace(
        m, clauses=tuple(c for c in m.clauses if c.label != "initial knows key2"))
    r = derive(pruned, pruned.queries[0], SearchBudget(max_depth=6))
    assert r.status is DeriveStatus.BUDGET_EXHAUSTED


def test_node_budget_is_respected(running_example):
    m = running_example
    r = derive(m, m.queries[0], SearchBudget(max_nodes=10))
    assert r.status is DeriveStatus.BUDGET_EXHAUSTED
    assert r.nodes_expanded <= 11


def test_depth_budget_is_respected(running_example):
    m = running_example
    r = derive(m, m.queries[0], SearchBudget(max_depth=3))
    assert r.status is DeriveStatus.BUDGET_EXHAUSTED
    assert r.depth == 3


def test_derive_is_deterministic(running_example):
    m = running_example
    trees = {dump_tree(derive(m, m.queries[0]).tree) for _ in range(5)}
    assert len(trees) == 1


# -- disequalities -----------------------------------------------------------


def diseq_model(hyp_var_in_conclusion=True):
    pp = PredicateSymbol("p", ("key",))
    qq = PredicateSymbol("q", ("key",))
    x = Variable("x", "key")
    y = Variable("y", "key")
    clauses = (
        Clause("fact a", (), Predicate(pp, (KEY1,))),
        Clause("fact b", (), Predicate(pp, (KEY2,))),
        Clause("step", (Predicate(pp, (x,)),
                        Disequality(x, KEY1) if hyp_var_in_conclusion
                        else Disequality(y, KEY1)),
               Predicate(qq, (x,))),
    )
    return Model(
        name="diseq", types=(ANY_TYPE, "key"), functions=(),
        predicates=(pp, qq),
        names=(NameSignature("key1", (), "key"), NameSignature("key2", (), "key")),
        clauses=clauses, queries=())


def test_disequality_filters_solutions():
    m = diseq_model()
    qq = m.predicate("q")
    ok = derive(m, Query(Predicate(qq, (KEY2,))))
    assert ok.status is DeriveStatus.ATTACK
    assert check_tree(m, ok.tree) == []
    blocked = derive(m, Query(Predicate(qq, (KEY1,))))
    assert blocked.status is DeriveStatus.NOT_FOUND


def test_non_ground_disequality_is_a_model_error():
    m = diseq_model(hyp_var_in_conclusion=False)
    with pytest.raises(SearchError):
        derive(m, Query(Predicate(m.predicate("q"), (KEY2,))))


# -- tree checking -----------------------------------------------------------


def attack_tree(m):
    r = derive(m, m.queries[0])
    assert r.status is DeriveStatus.ATTACK
    return r.tree


def test_check_tree_rejects_wrong_root_edge(running_example):
    t = attack_tree(running_example)
    bad = dataclasses.replace(t, root_fact=ik(running_example, KEY2))
    assert any("root edge" in d.message for d in check_tree(running_example, bad))


def test_check_tree_rejects_foreign_clause(running_example):
    t = attack_tree(running_example)
    foreign = dataclasses.replace(t.subroot.clause, label="not in model")
    bad = dataclasses.replace(t, subroot=dataclasses.replace(t.subroot, clause=foreign))
    assert any("not part of the model" in d.message
               for d in check_tree(running_example, bad))


def test_check_tree_rejects_mismatched_child(running_example):
    t = attack_tree(running_example)
    swapped = dataclasses.replace(
        t.subroot, children=(t.subroot.children[1], t.subroot.children[0]))
    bad = dataclasses.replace(t, subroot=swapped)
    diags = check_tree(running_example, bad)
    assert any("child" in d.message for d in diags)


def test_check_tree_rejects_wrong_substitution(running_example):
    t = attack_tree(running_example)
    tweaked = dataclasses.replace(
        t.subroot,
        sub=Substitution.of({Variable("k1", "key"): KEY1, Variable("k2", "key"): KEY1}))
    bad = dataclasses.replace(t, subroot=tweaked)
    assert any("substitution" in d.message or "hypothesis" in d.message
               for d in check_tree(running_example, bad))


def test_check_tree_rejects_open_label(running_example):
    t = attack_tree(running_example)
    open_label = ik(running_example, Variable("zz", "key"))
    tweaked = dataclasses.replace(t.subroot, conclusion_label=open_label)
    bad = dataclasses.replace(t, root_fact=open_label, subroot=tweaked)
    assert any("not closed" in d.message for d in check_tree(running_example, bad))


# -- oracle ------------------------------------------------------------------


def test_bounded_universe_by_type(running_example):
    uni = bounded_universe(running_example, depth=2)
    keys = set(map(str, uni["key"]))
    assert {"key1[]", "key2[]", "enc(key1[],key1[])", "enc(key1[],key2[])",
            "enc(key2[],key1[])", "enc(key2[],key2[])"} <= keys
    assert all(u == "wrapkey" or u == "hmackey" for u in map(str, uni["keytype"]))
    assert str(uni["hdl"][0]) == "handle1[]"


def test_bounded_universe_overflow(running_example):
    with pytest.raises(OracleOverflow):
        bounded_universe(running_example, depth=6, max_terms=50)


def test_oracle_agrees_on_running_example(running_example):
    m = running_example
    facts, iterations = oracle_fixpoint(m, depth=3, max_terms=2000)
    assert iterations >= 3
    assert ik(m, KEY1) in facts
    assert oracle_derivable(m, ik(m, KEY1), depth=3, max_terms=2000)
    hmackey = m.clause("initial key1").conclusion.args[2]
    absent = Predicate(m.predicate("storedkey"), (HANDLE1, KEY2, hmackey))
    assert absent not in facts


def test_oracle_is_monotone_in_depth(running_example):
    m = running_example
    f2, _ = oracle_fixpoint(m, depth=2, max_terms=2000)
    f3, _ = oracle_fixpoint(m, depth=3, max_terms=5000)
    assert f2 <= f3


def test_oracle_rejects_open_fact(running_example):
    with pytest.raises(ValueError):
        oracle_derivable(running_example, ik(running_example, Variable("x", "key")), 2)


def test_dump_tree_shape(running_example):
    text = dump_tree(attack_tree(running_example))
    assert text.startswith("derivation of iknows(key1[])\n")
    assert 'node 1: clause "decrypt wrap" sub {k1 -> key2[], k2 -> key1[]}' in text
    assert text.count("premise") == 6
