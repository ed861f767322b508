"""Randomised validation of the graph axioms and their derived laws.

Each law is a function ``rng -> (lhs, rhs)`` producing one random
instance.  Laws without metavariables are placed in a random context
``u @ law @ s`` so that instances differ.  Every instance is checked with
:func:`uncal.bisim.decide_equal`.

Group equations are checked at the level of mu-terms for the cyclic groups
of order 2 and 3.
"""
from __future__ import annotations

import random
import time

from .bisim import EqSystem, compile_mu, decide_equal, partition
from .generators import random_term
from .normalize import App, BVar, Mu, Plus, Var, Zero, fresh_id, mu_subst, mu_vector
from .syntax import (
    Compose,
    Cycle,
    Def,
    Edge,
    Emp,
    Man,
    MarkerRef,
    Nil,
    diag,
    ident,
    pair,
    product,
    projection,
    rename_source,
    substitute,
    union,
)

DEPTH = 3


def _names(stem, n, start=1):
    return tuple(f"{stem}{i}" for i in range(start, start + n))


def _ctx(rng, stem, lo=1, hi=2):
    return _names(stem, rng.randint(lo, hi))


def rt(rng, src, roots=1, depth=DEPTH):
    return random_term(rng, src, roots, depth)


def _pair_over(rng, src, n):
    """A random term ``src -> n roots`` built as a pair of single-root terms."""
    if n == 0:
        return Emp(tuple(src))
    return pair([rt(rng, src) for _ in range(n)], src)


def in_context(rng, lhs, rhs):
    """Wrap both sides as ``u @ side @ s`` with random ``s`` and ``u``."""
    w = _ctx(rng, "w", 0, 2)
    s = _pair_over(rng, w, len(lhs.src))
    u = rt(rng, _names("v", len(lhs.tgt)))
    return Compose(u, Compose(lhs, s)), Compose(u, Compose(rhs, s))


# -- the axioms -------------------------------------------------------------------


def law_sub1(rng):
    t = rt(rng, ("y",), rng.randint(1, 2))
    z = _ctx(rng, "z", 0, 2)
    s = rt(rng, z)
    return Compose(t, Def("y", s)), substitute(t, {"y": s})


def law_fix(rng):
    y, x = _ctx(rng, "y", 0, 2), _ctx(rng, "x")
    t = rt(rng, y + x, len(x))
    cy = Cycle(x, t)
    return cy, Compose(t, pair([ident(y), cy], y))


def law_bekic(rng):
    y, x, z = _ctx(rng, "y", 0, 2), _ctx(rng, "x"), _ctx(rng, "z")
    t = rt(rng, y + x + z, len(x))
    s = rt(rng, y + x + z, len(z))
    lhs = Cycle(x + z, pair([t, s]))
    cys = Cycle(z, s)
    yx = y + x
    inner = Cycle(x, Compose(t, pair([ident(yx), cys], yx)))
    left = pair([projection(yx, len(y), len(yx)), cys], yx)
    return lhs, Compose(left, pair([ident(y), inner], y))


def law_nat_y(rng):
    y, x, w = _ctx(rng, "y", 0, 2), _ctx(rng, "x"), _ctx(rng, "w", 0, 2)
    t = rt(rng, y + x, len(x))
    s = _pair_over(rng, w, len(y))
    lhs = Compose(Cycle(x, t), s)
    rhs = Cycle(x, Compose(t, product(s, ident(x))))
    return lhs, rhs


def law_nat_x(rng):
    y, x, z = _ctx(rng, "y", 0, 2), _ctx(rng, "x"), _ctx(rng, "z")
    t = rt(rng, y + x, len(z))
    s = rt(rng, z, len(x))
    lhs = Cycle(x, Compose(s, t))
    rhs = Compose(s, Cycle(z, Compose(t, product(ident(y), s))))
    return lhs, rhs


def law_ci(rng):
    x, m = _ctx(rng, "x", 0, 2), rng.randint(1, 3)
    y = _names("y", m)
    t = rt(rng, x + y)
    rhos = [pair([MarkerRef(rng.choice(y), y) for _ in range(m)], y) for _ in range(m)]
    lhs = Cycle(y, pair([Compose(t, product(ident(x), rho)) for rho in rhos]))
    delta = rename_source(diag(m), ("u",))
    rhs = Compose(diag(m), Cycle(("u",), Compose(t, product(ident(x), delta))))
    return lhs, rhs


def law_c2(rng):
    return in_context(rng, Cycle(("x",), Man(("y", "x"))), ident(("y",)))


def law_unit_l_man(rng):
    return in_context(rng, Compose(Man(("&", "y")), product(Nil(()), ident(("y",)))), ident(("y",)))


def law_assoc_man(rng):
    abc = ("a", "b", "c")
    lhs = Compose(Man(("a", "&")), product(ident(("a",)), Man(("b", "c"))))
    rhs = Compose(Man(("&", "c")), product(Man(("a", "b")), ident(("c",))))
    assert lhs.src == rhs.src == abc
    return in_context(rng, lhs, rhs)


def _swap_ab():
    ab = ("a", "b")
    return pair([MarkerRef("b", ab), MarkerRef("a", ab)], ab)


def law_com_man(rng):
    return in_context(rng, Compose(Man(("b", "a")), _swap_ab()), Man(("a", "b")))


def _dup1(name):
    ctx = (name,)
    return pair([MarkerRef(name, ctx), MarkerRef(name, ctx)], ctx)


def law_compa(rng):
    lhs = Compose(_dup1("&"), Man(("a", "b")))
    # (man x man) @ (id x c x id) @ (dup x dup)
    dd = product(_dup1("a"), _dup1("b"))            # <a,b> -> 4 roots
    four = ("p", "q", "r", "s")
    mid = pair([MarkerRef(n, four) for n in ("p", "r", "q", "s")], four)
    mm = product(Man(("p", "q")), Man(("r", "s")))
    rhs = Compose(mm, Compose(mid, dd))
    return in_context(rng, lhs, rhs)


def law_degen(rng):
    return in_context(rng, Compose(Man(("a", "b")), _dup1("&")), ident(("&",)))


# -- derived laws -------------------------------------------------------------------


def law_tmnl(rng):
    y, z = _ctx(rng, "y", 0, 2), _ctx(rng, "z")
    if rng.random() < 0.5:
        t = Compose(Emp(z), _pair_over(rng, y, len(z)))
    else:
        t = Compose(Emp(("x",)), Cycle(("x",), rt(rng, y + ("x",))))
    return t, Emp(y)


def _two(rng):
    y = _ctx(rng, "y", 0, 2)
    s = rt(rng, y, rng.randint(1, 2))
    t = rt(rng, y, rng.randint(1, 2))
    return y, s, t


def law_fst(rng):
    _, s, t = _two(rng)
    p = pair([s, t])
    return Compose(projection(p.tgt, 0, len(s.tgt)), p), s


def law_snd(rng):
    _, s, t = _two(rng)
    p = pair([s, t])
    return Compose(projection(p.tgt, len(s.tgt), len(p.tgt)), p), t


def law_dpair(rng):
    y, z = _ctx(rng, "y"), _ctx(rng, "z", 0, 2)
    t1, t2 = rt(rng, y, rng.randint(1, 2)), rt(rng, y, rng.randint(1, 2))
    s = _pair_over(rng, z, len(y))
    return Compose(pair([t1, t2]), s), pair([Compose(t1, s), Compose(t2, s)])


def law_fsi(rng):
    y1, y2 = _ctx(rng, "a"), _ctx(rng, "b")
    y = y1 + y2
    lhs = pair([projection(y, 0, len(y1)), projection(y, len(y1), len(y))], y)
    return in_context(rng, lhs, ident(y))


def law_sp(rng):
    y = _ctx(rng, "y", 0, 2)
    n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
    t = rt(rng, y, n1 + n2)
    lhs = pair([Compose(projection(t.tgt, 0, n1), t), Compose(projection(t.tgt, n1, n1 + n2), t)])
    return lhs, t


def law_bmul(rng):
    return in_context(rng, product(Emp(("a",)), Emp(("b",))), Compose(Emp(("&",)), Man(("a", "b"))))


def law_unit_r_man(rng):
    return in_context(rng, Compose(Man(("y", "&")), product(ident(("y",)), Nil(()))), ident(("y",)))


def law_c1(rng):
    return in_context(rng, Cycle(("x",), MarkerRef("x", ("x",))), Nil(()))


def law_unit_r_at(rng):
    y = _ctx(rng, "y", 0, 2)
    t = rt(rng, y, rng.randint(1, 2))
    return Compose(t, ident(y)) if y else Compose(t, Emp(())), t


def law_unit_l_at(rng):
    y = _ctx(rng, "y", 0, 2)
    t = rt(rng, y, rng.randint(1, 2))
    return Compose(ident(t.tgt), t), t


def law_assoc_at(rng):
    w = _ctx(rng, "w", 0, 2)
    u = rt(rng, w, rng.randint(1, 2))
    t = rt(rng, u.tgt, rng.randint(1, 2))
    s = rt(rng, t.tgt, rng.randint(1, 2))
    return Compose(Compose(s, t), u), Compose(s, Compose(t, u))


def law_bcomul(rng):
    return in_context(rng, Compose(_dup1("&"), Nil(())), product(Nil(()), Nil(())))


def law_bunit(rng):
    return in_context(rng, Compose(Emp(("&",)), Nil(())), Emp(()))


def _rooted3(rng):
    y = _ctx(rng, "y", 0, 2)
    return y, rt(rng, y), rt(rng, y), rt(rng, y)


def law_comm_union(rng):
    _, s, t, _ = _rooted3(rng)
    return union(s, t), union(t, s)


def law_unit_union(rng):
    y, t, _, _ = _rooted3(rng)
    if rng.random() < 0.5:
        return union(Nil(y), t), t
    return union(t, Nil(y)), t


def law_assoc_union(rng):
    _, s, t, u = _rooted3(rng)
    return union(union(s, t), u), union(s, union(t, u))


def law_degen2(rng):
    _, t, _, _ = _rooted3(rng)
    return union(t, t), t


AXIOMS = {
    "sub1": law_sub1,
    "fix": law_fix,
    "Bekic": law_bekic,
    "nat_Y": law_nat_y,
    "nat_X": law_nat_x,
    "CI": law_ci,
    "c2": law_c2,
    "unitL_man": law_unit_l_man,
    "assoc_man": law_assoc_man,
    "com_man": law_com_man,
    "compa": law_compa,
    "degen": law_degen,
}

DERIVED = {
    "tmnl": law_tmnl,
    "fst": law_fst,
    "snd": law_snd,
    "dpair": law_dpair,
    "fsi": law_fsi,
    "SP": law_sp,
    "bmul": law_bmul,
    "unitR_man": law_unit_r_man,
    "c1": law_c1,
    "unR_at": law_unit_r_at,
    "unL_at": law_unit_l_at,
    "assoc_at": law_assoc_at,
    "bcomul": law_bcomul,
    "bunit": law_bunit,
    "comm_union": law_comm_union,
    "unit_union": law_unit_union,
    "assoc_union": law_assoc_union,
    "degen'": law_degen2,
}


def mutant_relabel(rng):
    """Deliberately unsound: ``a:t = b:t``."""
    y = _ctx(rng, "y", 0, 2)
    t = rt(rng, y)
    return Edge("a", t), Edge("b", t)


MUTANTS = {"mutant_relabel": mutant_relabel}


# -- group equations ----------------------------------------------------------------


def cyclic_group(n):
    """Multiplication table of Z_n on elements 0 .. n-1."""
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def random_mu(rng, params, free=("y",), depth=3, labels=("a", "b")):
    """A random mu-term over the variables ``params`` and ``free``."""
    names = list(params) + list(free)

    def go(d, scope):
        r = rng.random()
        if d <= 0 or r < 0.15:
            leaves = [Zero()] + [Var(n) for n in names] + [BVar(b) for b in scope]
            return rng.choice(leaves)
        if r < 0.55:
            return App(rng.choice(labels), go(d - 1, scope))
        if r < 0.85:
            return Plus((go(d - 1, scope), go(d - 1, scope)))
        ident = fresh_id()
        return Mu(ident, go(d - 1, scope + [ident]))

    return go(depth, [])


def group_instance(rng, table):
    """Both sides of the group equation for ``table`` and a random body."""
    n = len(table)
    xs = [f"$x{i}" for i in range(n)]
    t = random_mu(rng, xs)
    ids = [fresh_id() for _ in range(n)]
    bodies = [mu_subst(t, {xs[j]: BVar(ids[table[i][j]]) for j in range(n)}) for i in range(n)]
    lhs = mu_vector(ids, bodies)[0]
    y = fresh_id()
    rhs = Mu(y, mu_subst(t, {x: BVar(y) for x in xs}))
    return lhs, rhs


def mu_equal(m1, m2) -> bool:
    sys = EqSystem()
    _, a = compile_mu(m1, sys)
    _, b = compile_mu(m2, sys)
    block_of = partition(sys, sys.reachable([a, b]))
    return block_of[a] == block_of[b]


# -- running the catalogue ------------------------------------------------------------


def check_law(name, law, samples, rng, keep=3):
    passed, failures = 0, []
    for _ in range(samples):
        lhs, rhs = law(rng)
        if decide_equal(lhs, rhs):
            passed += 1
        elif len(failures) < keep:
            failures.append((lhs, rhs))
    return {"law": name, "passed": passed, "total": samples, "failures": failures}


def check_axiom_catalogue(samples=200, seed=0, group_samples=None, extra_laws=None):
    """Check every law on ``samples`` random instances; return a report dict."""
    rng = random.Random(seed)
    group_samples = samples if group_samples is None else group_samples
    start = time.perf_counter()
    rows = []
    for kind, laws in (("axiom", AXIOMS), ("derived", DERIVED), ("extra", extra_laws or {})):
        for name, law in laws.items():
            row = check_law(name, law, samples, rng)
            row["kind"] = kind
            rows.append(row)
    for n in (2, 3):
        table = cyclic_group(n)
        passed, failures = 0, []
        for _ in range(group_samples):
            lhs, rhs = group_instance(rng, table)
            if mu_equal(lhs, rhs):
                passed += 1
            elif len(failures) < 3:
                failures.append((lhs, rhs))
        rows.append({"law": f"group_Z{n}", "kind": "group", "passed": passed, "total": group_samples, "failures": failures})
    return {
        "seed": seed,
        "samples": samples,
        "laws": rows,
        "ok": all(r["passed"] == r["total"] for r in rows),
        "seconds": time.perf_counter() - start,
    }
