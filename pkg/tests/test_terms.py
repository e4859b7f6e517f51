import pytest
from hypothesis import given, strategies as st

from hornpoc.terms import (
    EMPTY_SUBSTITUTION,
    FunApp,
    FunctionSymbol,
    Name,
    Substitution,
    UnifyError,
    Variable,
    apply,
    is_closed,
    match,
    rename_apart,
    subterms,
    term_depth,
    term_type,
    unify,
    variables_of,
)

FA0 = FunctionSymbol("fa0", (), "a")
FB0 = FunctionSymbol("fb0", (), "b")
F1 = FunctionSymbol("f1", ("a",), "a")
F2 = FunctionSymbol("f2", ("a", "b"), "a")
G1 = FunctionSymbol("g1", ("b",), "b")

X, Y, Z = Variable("x", "a"), Variable("y", "a"), Variable("z", "a")
U, V = Variable("u", "b"), Variable("v", "b")
NA = Name("na", (), "a")
A0 = FunApp(FA0, ())
B0 = FunApp(FB0, ())


def nb(param):
    return Name("nb", (param,), "b")


# -- basic structure ---------------------------------------------------------


def test_funapp_arity_checked():
    with pytest.raises(ValueError):
        FunApp(F1, ())


def test_term_type():
    assert term_type(X) == "a"
    assert term_type(nb(A0)) == "b"
    assert term_type(FunApp(F2, (X, U))) == "a"


def test_subterms_includes_name_params():
    t = FunApp(F2, (X, nb(FunApp(F1, (Y,)))))
    seen = list(subterms(t))
    assert Y in seen and X in seen and nb(FunApp(F1, (Y,))) in seen


def test_is_closed_sees_through_name_params():
    assert is_closed(nb(A0))
    assert not is_closed(nb(X))


def test_term_depth():
    assert term_depth(X) == 1
    assert term_depth(A0) == 1
    assert term_depth(FunApp(F1, (FunApp(F1, (A0,)),))) == 3
    assert term_depth(nb(FunApp(F1, (A0,)))) == 3


# -- substitutions -----------------------------------------------------------


def test_substitution_chain_resolution():
    s = Substitution.of({X: Y, Y: FunApp(F1, (Z,))})
    assert apply(s, X) == FunApp(F1, (Z,))
    assert apply(s, Y) == FunApp(F1, (Z,))


def test_substitution_drops_identity_bindings():
    assert Substitution.of({X: X}) == EMPTY_SUBSTITUTION


def test_substitution_rejects_ill_typed_binding():
    with pytest.raises(ValueError):
        Substitution.of({X: B0})


def test_substitution_rejects_cycle():
    with pytest.raises(ValueError):
        Substitution.of({X: FunApp(F1, (Y,)), Y: FunApp(F1, (X,))})


def test_apply_rewrites_name_params():
    s = Substitution.of({X: A0})
    assert apply(s, nb(X)) == nb(A0)


def test_compose_order():
    s1 = Substitution.of({X: Y})
    s2 = Substitution.of({Y: A0})
    composed = s1.compose(s2)
    assert apply(composed, X) == A0
    assert apply(composed, Y) == A0


def test_restrict():
    s = Substitution.of({X: A0, Y: NA})
    assert s.restrict({X}).domain() == {X}


# -- unification -------------------------------------------------------------


def test_unify_example():
    s = unify(FunApp(F2, (X, B0)), FunApp(F2, (A0, U)))
    assert apply(s, X) == A0 and apply(s, U) == B0


def test_unify_variable_variable():
    s = unify(X, Y)
    assert apply(s, X) == apply(s, Y)


def test_unify_name_params():
    s = unify(nb(X), nb(A0))
    assert s == Substitution.of({X: A0})


def test_unify_distinct_names_clash():
    with pytest.raises(UnifyError):
        unify(Name("n1", (), "a"), Name("n2", (), "a"))


def test_unify_occurs_check():
    with pytest.raises(UnifyError):
        unify(X, FunApp(F1, (X,)))


def test_unify_occurs_check_through_chain():
    # x = y and y inside f1(x) must still be rejected
    with pytest.raises(UnifyError):
        unify(FunApp(F2, (X, nb(Y))), FunApp(F2, (FunApp(F1, (Y,)), nb(X))))


def test_unify_symbol_clash():
    with pytest.raises(UnifyError):
        unify(A0, NA)


def test_unify_type_clash():
    with pytest.raises(UnifyError):
        unify(X, B0)


# -- matching ----------------------------------------------------------------


def test_match_is_one_sided():
    s = match(FunApp(F1, (X,)), FunApp(F1, (A0,)))
    assert s == Substitution.of({X: A0})
    with pytest.raises(UnifyError):
        match(FunApp(F1, (A0,)), FunApp(F1, (X,)))


def test_match_consistent_repeated_variable():
    p = FunApp(F2, (X, nb(X)))
    assert match(p, FunApp(F2, (A0, nb(A0)))) == Substitution.of({X: A0})
    with pytest.raises(UnifyError):
        match(p, FunApp(F2, (A0, nb(NA))))


def test_match_frozen_variables_are_constants():
    assert match(X, X, frozen={X}) == EMPTY_SUBSTITUTION
    with pytest.raises(UnifyError):
        match(X, A0, frozen={X})


def test_rename_apart():
    t = FunApp(F2, (X, nb(U)))
    r = rename_apart(t, "#1")
    assert variables_of(r) == {Variable("x#1", "a"), Variable("u#1", "b")}


# -- property tests ----------------------------------------------------------


def _terms(ty: str, depth: int) -> st.SearchStrategy:
    leaves = {
        "a": [st.just(X), st.just(Y), st.just(Z), st.just(NA), st.just(A0)],
        "b": [st.just(U), st.just(V), st.just(B0)],
    }[ty]
    if depth == 0:
        return st.one_of(leaves)
    inner = {
        "a": [
            st.builds(lambda t: FunApp(F1, (t,)), _terms("a", depth - 1)),
            st.builds(lambda t1, t2: FunApp(F2, (t1, t2)),
                      _terms("a", depth - 1), _terms("b", depth - 1)),
        ],
        "b": [
            st.builds(lambda t: FunApp(G1, (t,)), _terms("b", depth - 1)),
            st.builds(lambda t: nb(t), _terms("a", depth - 1)),
        ],
    }[ty]
    return st.one_of(leaves + inner)


terms_a = _terms("a", 3)
terms_b = _terms("b", 3)
any_terms = st.one_of(terms_a, terms_b)


@st.composite
def substitutions(draw):
    pool = {X: terms_a, Y: terms_a, Z: terms_a, U: terms_b, V: terms_b}
    chosen = draw(st.lists(st.sampled_from(sorted(pool, key=lambda v: v.id)),
                           unique=True, max_size=3))
    mapping = {}
    for v in chosen:
        t = draw(pool[v])
        if v not in variables_of(t):
            mapping[v] = t
    try:
        return Substitution.of(mapping)
    except ValueError:
        return EMPTY_SUBSTITUTION


@given(substitutions(), any_terms)
def test_apply_is_idempotent(s, t):
    once = apply(s, t)
    assert apply(s, once) == once


@given(substitutions(), any_terms)
def test_apply_preserves_type(s, t):
    assert term_type(apply(s, t)) == term_type(t)


@given(substitutions(), substitutions(), any_terms)
def test_compose_law(s1, s2, t):
    try:
        composed = s1.compose(s2)
    except ValueError:
        return  # composition can introduce a cycle; nothing to check then
    assert apply(composed, t) == apply(s2, apply(s1, t))


@given(terms_a, terms_a)
def test_unify_soundness(t1, t2):
    try:
        s = unify(t1, t2)
    except UnifyError:
        return
    assert apply(s, t1) == apply(s, t2)


@given(terms_a, terms_a)
def test_unify_is_symmetric_in_success(t1, t2):
    try:
        unify(t1, t2)
        ok1 = True
    except UnifyError:
        ok1 = False
    try:
        unify(t2, t1)
        ok2 = True
    except UnifyError:
        ok2 = False
    assert ok1 == ok2


@given(any_terms, substitutions())
def test_match_recovers_applied_substitution(t, s):
    target = apply(s, t)
    recovered = match(t, target)
    assert apply(recovered, t) == target
    assert recovered.domain() <= variables_of(t)


@given(terms_a, terms_a)
def test_match_implies_unify(t1, t2):
    try:
        match(t1, t2)
    except UnifyError:
        return
    assert apply(unify(t1, t2), t1) is not None
