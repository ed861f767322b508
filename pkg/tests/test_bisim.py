import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P
from uncal.bisim import (
    EqSystem,
    bisimilar,
    bounded_unfold,
    compare,
    compile,
    compile_mu,
    decide_equal,
    moore_levels,
    naive_bisim,
    partition,
    unfold_all,
    witness,
)
from uncal.errors import UncalTypeError
from uncal.generators import random_system, random_term
from uncal.normalize import App, BVar, Mu, Plus, Var, Zero
from uncal.syntax import Edge, union


def _reach_edges(sys, root):
    return sorted((s, l, t) for s in sys.reachable([root]) for l, t in sys.trans(s))


def test_self_loop_compiles_to_one_state():
    sys = compile(Mu(0, App("a", BVar(0))))
    (root,) = sys.roots
    scc = partition(sys, sys.reachable([root]))
    assert len(set(scc.values())) == 1
    assert any(l == "a" for l, _ in sys.trans(root))


def test_trivial_binder_is_empty():
    sys = compile(Mu(0, BVar(0)))
    (root,) = sys.roots
    assert not sys.trans(root)
    assert not sys.exits(root)


def test_binder_around_exit_is_the_exit():
    sys, a = compile_mu(Mu(0, Plus((BVar(0), Var("y")))))
    _, b = compile_mu(Var("y"), sys)
    assert sys.exits(a) == {"y"}
    assert bisimilar(sys, a, b)


def test_free_variables_can_include_states():
    sys = EqSystem()
    target = sys.new_state()
    sys.add_exit(target, "z")
    _, s = compile_mu(App("a", Var("hole")), sys, {"hole": target})
    ((label, t),) = sys.trans(s)
    assert label == "a" and sys.exits(t) == {"z"}


def test_examples_of_equality():
    assert decide_equal(P("cycle(& := a:&)"), P("a:cycle(& := a:&)"))
    assert decide_equal(P("a:{} | a:{}"), P("a:{}"))
    assert decide_equal(P("cycle(x := a:x | a:a:x)"), P("cycle(x := a:x)"))
    assert not decide_equal(P("a:{}"), P("b:{}"))
    assert not decide_equal(P("a:{}"), P("a:{} | b:{}"))
    assert not decide_equal(P("y", ("y",)), P("{}", ("y",)))


def test_multi_root_equality():
    assert decide_equal(P("a:() ++ b:()"), P("(a:() | a:()) ++ b:()"))
    assert not decide_equal(P("a:() ++ b:()"), P("b:() ++ a:()"))


def test_root_count_mismatch_is_a_type_error():
    with pytest.raises(UncalTypeError):
        decide_equal(P("a:()"), P("a:() ++ b:()"))


def test_witness_for_labels():
    ok, info = compare(P("a:{}"), P("b:{}"))
    assert not ok and info == (0, ["a"])


def test_witness_goes_deep():
    ok, (root, path) = compare(P("a:b:c:{}"), P("a:b:d:{}"))
    assert not ok and root == 0
    assert path == ["a", "b", "c"]


def test_witness_on_exits():
    ok, (_, path) = compare(P("a:y", ("y",)), P("a:{}", ("y",)))
    assert not ok and path == ["a"]
    ok, (_, path) = compare(P("y", ("y",)), P("{}", ("y",)))
    assert path == []


def test_witness_none_when_equal():
    sys, a = compile_mu(Mu(0, App("a", BVar(0))))
    _, b = compile_mu(App("a", Mu(0, App("a", BVar(0)))), sys)
    assert witness(sys, a, b) is None


def test_bounded_unfold_examples():
    sys, a = compile_mu(Mu(0, App("a", BVar(0))))
    _, b = compile_mu(App("a", App("a", Zero())), sys)
    table = {}
    assert bounded_unfold(sys, a, 2, table) is bounded_unfold(sys, b, 2, table)
    assert bounded_unfold(sys, a, 3, table) is not bounded_unfold(sys, b, 3, table)
    assert bounded_unfold(sys, a, 0, table).to_data() == {"exits": [], "children": []}


def test_moore_levels_end_stable():
    sys = EqSystem.from_edges(3, [(0, "a", 1), (1, "a", 2)])
    levels = moore_levels(sys)
    assert levels[-1][0] != levels[-1][1] != levels[-1][2]
    assert len(levels) == 3


def _related(sys, states):
    block_of = partition(sys, states)
    return {(s, t) for s in states for t in states if block_of[s] == block_of[t]}


def test_partition_agrees_with_naive_on_random_systems():
    r = random.Random(99)
    for _ in range(150):
        sys = random_system(r)
        states = list(sys.states)
        assert _related(sys, states) == naive_bisim(sys, states)


def test_bisimilar_states_unfold_alike():
    r = random.Random(5)
    for _ in range(60):
        sys = random_system(r, r.randint(2, 12))
        n = len(sys)
        block_of = partition(sys)
        trees = unfold_all(sys, n * n)
        for s in sys.states:
            for t in sys.states:
                if block_of[s] == block_of[t]:
                    assert trees[s] is trees[t]


def test_exits_are_only_on_var_states():
    sys, root = compile_mu(Plus((App("a", Var("y")), Var("z"))))
    assert sys.exits(root) == {"z"}
    ((_, t),) = sys.trans(root)
    assert sys.exits(t) == {"y"}


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_union_with_itself(r):
    t = random_term(r, ("y",), 1, 3)
    assert decide_equal(union(t, t), t)


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_equality_is_an_equivalence(r):
    t = random_term(r, ("y",), 1, 3)
    s = random_term(r, ("y",), 1, 3)
    assert decide_equal(t, t)
    assert decide_equal(t, s) == decide_equal(s, t)
    u = union(s, s)
    if decide_equal(t, s):
        assert decide_equal(t, u)


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_equality_is_a_congruence(r):
    t = random_term(r, ("y",), 1, 3)
    s = union(t, t)
    c = random_term(r, ("y",), 1, 2)
    assert decide_equal(Edge("a", t), Edge("a", s))
    assert decide_equal(union(t, c), union(c, s))


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_edge_labels_matter(r):
    t = random_term(r, ("y",), 1, 3)
    assert not decide_equal(Edge("a", t), Edge("b", t))
