import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P
from uncal.errors import ArityError, CompileError, UncalSyntaxError, UncalTypeError
from uncal.generators import random_term
from uncal.syntax import Compose, Cycle, Edge, Man, MarkerRef, Nil, Pair, define, typecheck
from uncal.surface import ingest_tree, parse_program, parse_term, print_term, rebind, tokenize


def test_braces_expand_to_union():
    t = P("{a:{}, b:{}}")
    assert t == Compose(Man(("&1", "&2")), Pair((Edge("a", Nil()), Edge("b", Nil()))))


def test_cycle_with_default_marker():
    t = P("cycle(& := a:&)")
    assert t == Cycle(("&",), define("&", Edge("a", MarkerRef("&", ("&",)))))
    assert print_term(t) == "cycle(& := a:&)"


def test_incomplete_edge_is_a_syntax_error():
    with pytest.raises(UncalSyntaxError) as info:
        P("a:")
    assert info.value.line == 1 and info.value.col == 3


def test_syntax_error_position():
    with pytest.raises(UncalSyntaxError) as info:
        P("{a:{},\n  b:{} ]")
    assert info.value.line == 2
    with pytest.raises(UncalSyntaxError):
        P("a:{} %")


def test_printing_examples():
    assert print_term(P("man @ (a:{} ++ b:{})")) == "{a:{}, b:{}}"
    assert print_term(Nil(("y",)), annotate=True) == "()<y>"
    assert print_term(P("!")) == "!"
    assert print_term(P('"two words":{}')) == '"two words":{}'
    assert print_term(P('"cycle":{}')) == '"cycle":{}'
    assert print_term(P("12:{}")) == "12:{}"


def test_annotations_are_checked():
    assert P("()<y>", src=("y",)) == Nil(("y",))
    with pytest.raises(UncalTypeError):
        P("()<y>", src=())


def test_multi_cycle_and_pair_parse():
    t = P("cycle[x1,x2](a:x2 ++ b:x1)")
    assert typecheck(t).target == ("x1", "x2")
    assert print_term(t) == "cycle[x1,x2]((a:x2 ++ b:x1))" or parse_term(print_term(t)) == rebind(t)


def test_unicode_operators():
    assert P("a:{} ∪ b:{}") == P("a:{} | b:{}")
    assert P("(a:{} ⊕ b:{})") == P("(a:{} ++ b:{})")


def test_comments_and_whitespace():
    assert P("# leading comment\n a:{}  # trailing\n") == P("a:{}")


def test_tokenizer_values():
    kinds = [(t.kind, t.value) for t in tokenize('a "b c" 3 &x cycle :=')]
    assert kinds[:-1] == [("ident", "a"), ("string", "b c"), ("int", 3), ("marker", "&x"), ("kw", "cycle"), ("op", ":=")]


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False), st.integers(0, 2), st.integers(0, 2))
def test_round_trip(r, nsrc, roots):
    src = tuple(f"y{i}" for i in range(nsrc))
    t = random_term(r, src, roots, 4)
    text = print_term(t)
    back = parse_term(text, src=t.src)
    assert typecheck(back) == typecheck(rebind(t))
    assert back == rebind(t)
    assert rebind(back) == back
    assert print_term(back) == text


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_annotated_round_trip(r):
    t = random_term(r, ("y",), 1, 3)
    assert parse_term(print_term(t, annotate=True), src=t.src) == rebind(t)


# -- programs --------------------------------------------------------------------

F1 = "sfun f1(L:T) = if L = ethnicGroup then (result:T) else f1(T)"
AA = """
sfun a?(L:T)  = if L=a then true:{} else {}
sfun aa?(L:T) = if L=a then a?(T) else aa?(T)
"""


def test_f1_program():
    prog = parse_program(F1)
    assert [[f.name for f in b] for b in prog.blocks] == [["f1"]]
    assert prog.functions["f1"].uses_tail()


def test_mutual_block():
    prog = parse_program(AA)
    assert [[f.name for f in b] for b in prog.blocks] == [["a?", "aa?"]]
    assert not prog.functions["a?"].uses_tail()


def test_unrelated_functions_get_separate_blocks():
    prog = parse_program("sfun f(L:T) = a:f(T)\nsfun g(L:T) = b:g(T)")
    assert len(prog.blocks) == 2


def test_undefined_call():
    with pytest.raises(UncalSyntaxError):
        parse_program("sfun f(L:T) = g(T)")


def test_call_arity_and_argument():
    with pytest.raises(ArityError):
        parse_program("sfun f(L:T) = f(T, T)")
    with pytest.raises(CompileError):
        parse_program("sfun f(L:T) = f(L)")


def test_conditional_must_test_label_variable():
    with pytest.raises(UncalSyntaxError):
        parse_program("sfun f(L:T) = if T = a then {} else {}")


def test_bindings_and_queries():
    prog = parse_program("sfun f(L:T) = a:f(T)\nlet d = b:{}\nquery f(d)\nquery f(c:{})\nquery f(input)")
    assert prog.queries[0] == ("f", "d")
    assert prog.queries[1][1] == P("c:{}")
    assert prog.queries[2] == ("f", "input")
    assert prog.bindings["d"] == P("b:{}")


def test_duplicate_function():
    with pytest.raises(UncalSyntaxError):
        parse_program("sfun f(L:T) = {}\nsfun f(L:T) = {}")


# -- ingestion -------------------------------------------------------------------


def test_ingest_examples(data_dir):
    assert ingest_tree('{"a": {}}') == Edge("a", Nil())
    assert ingest_tree('"Celtic"') == Edge("Celtic", Nil())
    sd = ingest_tree((data_dir / "country.json").read_text())
    assert print_term(sd).count("ethnicGroup:") == 3
    assert typecheck(sd).source == () and typecheck(sd).target == ("&",)


def test_ingest_scalars_and_lists():
    from uncal.bisim import decide_equal

    t = ingest_tree('{"n": 3, "ok": true, "x": null, "l": [1, "a"]}')
    assert decide_equal(t, P("{n:3:{}, ok:true:{}, x:{}, l:{1:{}, a:{}}}"))


def test_ingest_rejects_bad_json():
    with pytest.raises(UncalSyntaxError):
        ingest_tree('{"a": ')


def _tree_only(t):
    if isinstance(t, (Cycle,)):
        return False
    if isinstance(t, Compose):
        return isinstance(t.left, Man) and all(_tree_only(i) for i in t.right.items)
    if isinstance(t, Edge):
        return _tree_only(t.body)
    return isinstance(t, Nil)


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-5, 5) | st.text("abc", max_size=3),
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text("xyz", min_size=1, max_size=2), inner, max_size=3),
    max_leaves=12,
)


@settings(max_examples=200, deadline=None)
@given(json_values)
def test_ingestion_gives_trees(doc):
    t = ingest_tree(json.dumps(doc))
    assert typecheck(t).source == () and typecheck(t).target == ("&",)
    assert _tree_only(t)
