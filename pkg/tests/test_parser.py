import pytest

from hornpoc.library import list_entries
from hornpoc.model import (
    ClauseAnnotation,
    Disequality,
    IndexHole,
    LiteralSegment,
    Severity,
    TermHole,
)
from hornpoc.parser import parse_model, print_model
from hornpoc.terms import FunApp, Name, Variable

BASE = """
type key.
name key1[]: key.
name h[key]: key.
fun enc(key, key): key.
fun unit(): key.
pred iknows(key).
pred stored(key, key).
"""


def parse_ok(text):
    result = parse_model(BASE + text, "test.exthorntype")
    assert result.model is not None, result.diagnostics
    return result


def parse_err(text):
    result = parse_model(BASE + text, "test.exthorntype")
    assert result.model is None
    return [d for d in result.diagnostics if d.severity is Severity.ERROR]


def test_declarations_and_clause():
    m = parse_ok('clause "c" iknows(k1) => iknows(enc(k1, key1[])).').model
    c = m.clause("c")
    assert c.hypotheses[0].args == (Variable("k1", "key"),)
    assert c.conclusion.args[0].args[1] == Name("key1", (), "key")


def test_bare_identifier_prefers_declared_constant():
    m = parse_ok('clause "c" iknows(unit) => iknows(unit).').model
    (arg,) = m.clause("c").conclusion.args
    assert isinstance(arg, FunApp) and arg.symbol.id == "unit"


def test_variable_type_inferred_from_position():
    m = parse_ok('clause "c" stored(a, b) => iknows(a).').model
    assert m.clause("c").hypotheses[0].args == (
        Variable("a", "key"), Variable("b", "key"))


def test_name_with_parameters():
    m = parse_ok('clause "c" iknows(k) => iknows(h[k]).').model
    assert m.clause("c").conclusion.args[0] == Name(
        "h", (Variable("k", "key"),), "key")


def test_disequality_hypothesis():
    m = parse_ok('clause "c" iknows(k) && k <> key1[] => iknows(k).').model
    d = m.clause("c").hypotheses[1]
    assert isinstance(d, Disequality)
    assert d.rhs == Name("key1", (), "key")


def test_line_comments_are_trivia():
    parse_ok("// a comment\nclause \"c\" iknows(k) => iknows(k). // trailing\n")


def test_clause_annotation_elaboration():
    r = parse_ok('clause "c" iknows(k) => iknows(enc(k, k))\n'
                 '  (**| |enc(k, k)| = wrap(|k|) **).')
    ann = r.model.clause("c").annotation
    k = Variable("k", "key")
    assert ann == ClauseAnnotation((
        TermHole(FunApp(r.model.function("enc", 2), (k, k))),
        LiteralSegment(" = wrap("),
        TermHole(k),
        LiteralSegment(")"),
    ))


def test_annotation_delimiter_is_first_character():
    r1 = parse_ok('clause "c" iknows(k) => iknows(k) (**| x(|k|) **).')
    r2 = parse_ok('clause "c" iknows(k) => iknows(k) (**@ x(@k@) **).')
    assert r1.model.clause("c").annotation == r2.model.clause("c").annotation


def test_annotation_escape_for_close_bracket():
    r = parse_ok('clause "c" iknows(k) => iknows(k) (**| f(*\\) **).')
    assert r.model.clause("c").annotation.segments == (LiteralSegment("f(*)"),)


def test_annotation_interior_whitespace_is_exact():
    r = parse_ok('clause "c" iknows(k) => iknows(k) (**| a  ( |k| )  b **).')
    segs = r.model.clause("c").annotation.segments
    assert segs[0] == LiteralSegment("a  ( ")
    assert segs[2] == LiteralSegment(" )  b")


def test_annotation_unknown_variable_is_an_error():
    errs = parse_err('clause "c" iknows(k) => iknows(k) (**| |zz| **).')
    assert any("unknown variable" in d.message for d in errs)


def test_annotation_unbalanced_delimiter():
    errs = parse_err('clause "c" iknows(k) => iknows(k) (**| |k **).')
    assert any("unbalanced" in d.message for d in errs)


def test_function_annotation_indices():
    r = parse_ok("fun pair(key, key): key (**| (|1|, |2|) **).\n"
                 'clause "c" iknows(k) => iknows(k).')
    ann = r.model.function("pair", 2).annotation
    assert ann.segments == (
        LiteralSegment("("), IndexHole(1), LiteralSegment(", "),
        IndexHole(2), LiteralSegment(")"))


def test_function_annotation_index_out_of_range():
    errs = parse_err("fun pair(key, key): key (**| |3| **).")
    assert any("1..2" in d.message for d in errs)


def test_header_footer_preserve_interior_lines():
    r = parse_ok("header (**\nimport x\n\ny = 1\n**)\n"
                 'clause "c" iknows(k) => iknows(k).\n'
                 "footer (** done() **)")
    assert r.model.header == "import x\n\ny = 1"
    assert r.model.footer == "done()"


def test_queries():
    r = parse_ok('clause "c" iknows(k) => iknows(k).\nquery iknows(key1[]).')
    assert str(r.model.queries[0]) == "iknows(key1[])"


def test_error_spans_point_at_the_offender():
    result = parse_model("type key.\nfun bad(nope): key.\n", "m.exthorntype")
    assert result.model is None
    d = result.diagnostics[0]
    assert d.span.file == "m.exthorntype"
    assert d.span.line == 2
    assert d.span.column == 9


def test_unknown_declaration_keyword():
    result = parse_model("frobnicate x.", "m.exthorntype")
    assert result.model is None
    assert "unknown declaration" in result.diagnostics[0].message


def test_arity_mismatch_is_an_error():
    errs = parse_err('clause "c" iknows(k) => iknows(enc(k)).')
    assert any("undeclared function 'enc'/1" in d.message for d in errs)


def test_cannot_infer_type_of_lone_variable():
    result = parse_model(
        BASE + 'clause "c" x <> y => iknows(x).', "test.exthorntype")
    assert result.model is None


@pytest.mark.parametrize("entry", list_entries(), ids=lambda e: e.name)
def test_print_parse_round_trip(entry):
    m = entry.load()
    printed = print_model(m)
    again = parse_model(printed, f"{entry.name}.exthorntype", entry.name)
    assert again.model is not None, again.diagnostics
    assert again.model == m
    assert print_model(again.model) == printed
