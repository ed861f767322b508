"""Rewriting UnCAL terms to normal forms, and normal forms as mu-terms.

Three oriented rules are used and nothing else:

* ``(sub)``    ``t @ <s1 ++ ... ++ sk> -> t[y1 -> s1, ..., yk -> sk]``
* ``(Bekic)``  splits a cycle over several markers into nested one-marker
  cycles (first marker against the rest, iterated);
* ``(union)``  ``man @ (s ++ t)`` is read as ``s U t``.

The results are :class:`NormalForm` values whose bound markers are
numbered by binder depth, so structural equality is alpha-equivalence.
"""
from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass

from .errors import FuelExhausted, UncalTypeError
from .syntax import (
    Compose,
    Cycle,
    Def,
    Edge,
    Emp,
    Man,
    MarkerRef,
    Nil,
    Pair,
    Term,
    fresh,
    pair,
    subst_all,
    union_all,
)

DEFAULT_FUEL = 10**7


def fuel_budget():
    return int(os.environ.get("UNCAL_FUEL", DEFAULT_FUEL))


# -- normal forms ------------------------------------------------------------


class NormalForm:
    __slots__ = ()


@dataclass(frozen=True)
class NVar(NormalForm):
    name: str


@dataclass(frozen=True)
class NBound(NormalForm):
    level: int


@dataclass(frozen=True)
class NEdge(NormalForm):
    label: object
    body: NormalForm


@dataclass(frozen=True)
class NCycle(NormalForm):
    level: int
    body: NormalForm


@dataclass(frozen=True)
class NNil(NormalForm):
    pass


@dataclass(frozen=True)
class NUnion(NormalForm):
    items: tuple

    def __post_init__(self):
        flat = []
        for it in self.items:
            flat.extend(it.items if isinstance(it, NUnion) else (it,))
        object.__setattr__(self, "items", tuple(flat))


# -- mu-terms ----------------------------------------------------------------


class MuTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Var(MuTerm):
    """A free variable, i.e. a leaf marker."""

    name: str


@dataclass(frozen=True)
class BVar(MuTerm):
    ident: int


@dataclass(frozen=True)
class App(MuTerm):
    label: object
    arg: MuTerm


@dataclass(frozen=True)
class Mu(MuTerm):
    ident: int
    body: MuTerm


@dataclass(frozen=True)
class Zero(MuTerm):
    pass


@dataclass(frozen=True)
class Plus(MuTerm):
    items: tuple

    def __post_init__(self):
        flat = []
        for it in self.items:
            flat.extend(it.items if isinstance(it, Plus) else (it,))
        object.__setattr__(self, "items", tuple(flat))


def to_mu(n: NormalForm) -> MuTerm:
    if isinstance(n, NVar):
        return Var(n.name)
    if isinstance(n, NBound):
        return BVar(n.level)
    if isinstance(n, NEdge):
        return App(n.label, to_mu(n.body))
    if isinstance(n, NCycle):
        return Mu(n.level, to_mu(n.body))
    if isinstance(n, NNil):
        return Zero()
    if isinstance(n, NUnion):
        return Plus(tuple(to_mu(it) for it in n.items))
    raise TypeError(n)


def show_mu(m: MuTerm) -> str:
    """Plain-text rendering, e.g. ``mu x0. a(x0) + y``."""
    if isinstance(m, Var):
        return m.name
    if isinstance(m, BVar):
        return f"x{m.ident}"
    if isinstance(m, App):
        return f"{m.label}({show_mu(m.arg)})"
    if isinstance(m, Mu):
        return f"mu x{m.ident}. {show_mu(m.body)}"
    if isinstance(m, Zero):
        return "0"
    if isinstance(m, Plus):
        return " + ".join(f"({show_mu(it)})" if isinstance(it, Mu) else show_mu(it) for it in m.items)
    raise TypeError(m)


def from_mu(m: MuTerm) -> NormalForm:
    if isinstance(m, Var):
        return NVar(m.name)
    if isinstance(m, BVar):
        return NBound(m.ident)
    if isinstance(m, App):
        return NEdge(m.label, from_mu(m.arg))
    if isinstance(m, Mu):
        return NCycle(m.ident, from_mu(m.body))
    if isinstance(m, Zero):
        return NNil()
    if isinstance(m, Plus):
        return NUnion(tuple(from_mu(it) for it in m.items))
    raise TypeError(m)


_ids = itertools.count(1_000_000)


def fresh_id() -> int:
    return next(_ids)


def mu_subst(m: MuTerm, env: dict) -> MuTerm:
    """Replace bound or free variables; keys are ints (binders) or names."""
    if isinstance(m, BVar):
        return env.get(m.ident, m)
    if isinstance(m, Var):
        return env.get(m.name, m)
    if isinstance(m, App):
        return App(m.label, mu_subst(m.arg, env))
    if isinstance(m, Mu):
        inner = {k: v for k, v in env.items() if k != m.ident}
        return Mu(m.ident, mu_subst(m.body, inner))
    if isinstance(m, Plus):
        return Plus(tuple(mu_subst(it, env) for it in m.items))
    return m


def canon_mu(m: MuTerm, scope=None, depth=0) -> MuTerm:
    """Renumber binders by depth so that alpha-equivalent terms coincide."""
    scope = scope or {}
    if isinstance(m, BVar):
        return BVar(scope[m.ident]) if m.ident in scope else m
    if isinstance(m, App):
        return App(m.label, canon_mu(m.arg, scope, depth))
    if isinstance(m, Mu):
        return Mu(depth, canon_mu(m.body, {**scope, m.ident: depth}, depth + 1))
    if isinstance(m, Plus):
        return Plus(tuple(canon_mu(it, scope, depth) for it in m.items))
    return m


def plus(items) -> MuTerm:
    items = list(items)
    if not items:
        return Zero()
    if len(items) == 1:
        return items[0]
    return Plus(tuple(items))


def mu_vector(ids, bodies):
    """Solve the simultaneous fixpoint ``x_i = body_i`` by Bekic splitting."""
    ids, bodies = list(ids), list(bodies)
    if len(ids) == 1:
        return [Mu(ids[0], bodies[0])]
    rest = mu_vector(ids[1:], bodies[1:])
    first = Mu(ids[0], mu_subst(bodies[0], dict(zip(ids[1:], rest))))
    return [first] + [mu_subst(r, {ids[0]: first}) for r in rest]


def mu_free(m: MuTerm) -> set:
    if isinstance(m, Var):
        return {m.name}
    if isinstance(m, App):
        return mu_free(m.arg)
    if isinstance(m, Mu):
        return mu_free(m.body)
    if isinstance(m, Plus):
        return set().union(*(mu_free(it) for it in m.items))
    return set()


# -- the rewrite system ------------------------------------------------------


def _pair_shaped(r: Term) -> bool:
    if len(r.tgt) <= 1:
        return True
    return isinstance(r, Pair) and all(len(it.tgt) <= 1 for it in r.items)


def _is_union(t: Term) -> bool:
    return (
        isinstance(t, Compose)
        and isinstance(t.left, Man)
        and isinstance(t.right, Pair)
        and len(t.right.items) == 2
        and all(len(it.tgt) == 1 for it in t.right.items)
    )


def _redex_kind(t: Term):
    if isinstance(t, Compose):
        if not _is_union(t) and _pair_shaped(t.right):
            return "sub"
    elif isinstance(t, Cycle):
        if not t.bound:
            return "cycle0"
        if len(t.bound) >= 2 and isinstance(t.body, Pair):
            first = next(it for it in t.body.items if it.tgt)
            if len(first.tgt) == 1:
                return "bekic"
    return None


def _children(t: Term):
    if isinstance(t, (Edge, Def, Cycle)):
        return (t.body,)
    if isinstance(t, Compose):
        return (t.left, t.right)
    if isinstance(t, Pair):
        return t.items
    return ()


def _rebuild(t: Term, i: int, child: Term) -> Term:
    if isinstance(t, Edge):
        return Edge(t.label, child)
    if isinstance(t, Def):
        return Def(t.name, child)
    if isinstance(t, Cycle):
        return Cycle(t.bound, child)
    if isinstance(t, Compose):
        return Compose(child, t.right) if i == 0 else Compose(t.left, child)
    if isinstance(t, Pair):
        items = list(t.items)
        items[i] = child
        return pair(items, t.src)
    raise TypeError(t)


def redexes(t: Term):
    """All redexes as ``(path, kind, depth)``, in pre-order."""
    out = []
    stack = [(t, ())]
    while stack:
        node, path = stack.pop()
        kind = _redex_kind(node)
        if kind:
            out.append((path, kind))
        kids = _children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((kids[i], path + (i,)))
    return out


def _at(t, path):
    for i in path:
        t = _children(t)[i]
    return t


def _replace(t, path, new):
    if not path:
        return new
    i = path[0]
    return _rebuild(t, i, _replace(_children(t)[i], path[1:], new))


def contract_sub(t: Compose) -> Term:
    l, r = t.left, t.right
    if len(r.tgt) == 1:
        images = [r]
    elif isinstance(r, Pair):
        images = [it for it in r.items if it.tgt]
    else:
        images = []
    return subst_all(l, dict(zip(l.src, images)), r.src)


def bekic_rhs(cyc: Cycle) -> Term:
    """``cy<t ++ s> = <pi2 ++ cy(s)> @ <Id_Y ++ cy(t @ <Id_{Y,A} ++ cy(s)>)>``."""
    items = list(cyc.body.items)
    k = next(i for i, it in enumerate(items) if it.tgt)
    t = items[k]
    s = pair(items[:k] + items[k + 1:], cyc.body.src)
    y = cyc.src
    a, v = cyc.bound[:1], cyc.bound[1:]
    ya = y + a
    cy_s = Cycle(v, s)
    inner = Compose(t, pair([MarkerRef(z, ya) for z in ya] + [cy_s], ya))
    cy_t = Cycle(a, inner)
    right = pair([MarkerRef(z, y) for z in y] + [cy_t], y)
    left = pair([MarkerRef(a[0], ya), cy_s], ya)
    return Compose(left, right)


def _contract(node, kind):
    if kind == "sub":
        return contract_sub(node)
    if kind == "bekic":
        return bekic_rhs(node)
    if kind == "cycle0":
        return Emp(node.src)
    raise ValueError(kind)


def _depth(path):
    return len(path)


def _choose(found, strategy, rng):
    if strategy == "innermost":
        inner = [f for f in found if not any(g[0][: len(f[0])] == f[0] and g[0] != f[0] for g in found)]
        return inner[0]
    if strategy == "outermost":
        return min(found, key=lambda f: len(f[0]))
    if strategy == "random":
        return rng.choice(found)
    # default: innermost (sub) first, then outermost Bekic, then the rest
    subs = [f for f in found if f[1] == "sub"]
    if subs:
        return max(subs, key=lambda f: len(f[0]))
    bek = [f for f in found if f[1] == "bekic"]
    if bek:
        return min(bek, key=lambda f: len(f[0]))
    return found[0]


STRATEGIES = ("default", "innermost", "outermost", "random")


def rewrite(t: Term, strategy="default", rng=None, fuel=None) -> Term:
    """Rewrite ``t`` until no redex is left; returns a term."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if strategy == "random" and rng is None:
        rng = random.Random(0)
    fuel = fuel_budget() if fuel is None else fuel
    steps = 0
    while True:
        found = redexes(t)
        if not found:
            return t
        steps += 1
        if steps > fuel:
            raise FuelExhausted(f"normalisation exceeded {fuel} steps")
        path, kind = _choose(found, strategy, rng)
        t = _replace(t, path, _contract(_at(t, path), kind))


def _read_nf(t: Term, levels: dict, depth: int) -> NormalForm:
    if isinstance(t, MarkerRef):
        if t.name in levels:
            return NBound(levels[t.name])
        return NVar(t.name)
    if isinstance(t, Edge):
        return NEdge(t.label, _read_nf(t.body, levels, depth))
    if isinstance(t, Nil):
        return NNil()
    if isinstance(t, Def):
        return _read_nf(t.body, levels, depth)
    if isinstance(t, Cycle) and len(t.bound) == 1:
        inner = {**levels, t.bound[0]: depth}
        return NCycle(depth, _read_nf(t.body, inner, depth + 1))
    if _is_union(t):
        a, b = t.right.items
        return NUnion((_read_nf(a, levels, depth), _read_nf(b, levels, depth)))
    if isinstance(t, Man):
        # man on its own is the union of its two leaves
        return NUnion(tuple(NBound(levels[y]) if y in levels else NVar(y) for y in t.ctx))
    if isinstance(t, Pair):
        live = [it for it in t.items if it.tgt]
        if len(live) == 1:
            return _read_nf(live[0], levels, depth)
    raise AssertionError(f"not a normal form: {type(t).__name__}")


def normalize(t: Term, strategy="default", rng=None, fuel=None) -> NormalForm:
    """The normal form of a single-rooted term."""
    if len(t.tgt) != 1:
        raise UncalTypeError("nf", f"normalize needs one root, got {len(t.tgt)}; use normalize_vec", t)
    return _read_nf(rewrite(t, strategy, rng, fuel), {}, 0)


def project(t: Term, i: int) -> Term:
    names = t.tgt
    return Compose(MarkerRef(names[i], names), t)


def normalize_vec(t: Term, strategy="default", rng=None, fuel=None) -> list:
    """One normal form per root of ``t``."""
    if len(t.tgt) == 1:
        return [normalize(t, strategy, rng, fuel)]
    return [normalize(project(t, i), strategy, rng, fuel) for i in range(len(t.tgt))]


# -- back to terms -----------------------------------------------------------


def nf_free(n: NormalForm) -> list:
    """Free markers in first-occurrence order."""
    out = []

    def walk(m):
        if isinstance(m, NVar):
            if m.name not in out:
                out.append(m.name)
        elif isinstance(m, (NEdge, NCycle)):
            walk(m.body)
        elif isinstance(m, NUnion):
            for it in m.items:
                walk(it)

    walk(n)
    return out


def embed(n: NormalForm, src=None) -> Term:
    """Read a normal form back as a term over ``src`` (default: its free markers)."""
    src = tuple(nf_free(n) if src is None else src)
    return _embed(n, src, {})


def _embed(n, ctx, names):
    if isinstance(n, NVar):
        return MarkerRef(n.name, ctx)
    if isinstance(n, NBound):
        return MarkerRef(names[n.level], ctx)
    if isinstance(n, NEdge):
        return Edge(n.label, _embed(n.body, ctx, names))
    if isinstance(n, NNil):
        return Nil(ctx)
    if isinstance(n, NUnion):
        return union_all([_embed(it, ctx, names) for it in n.items], ctx)
    if isinstance(n, NCycle):
        x = fresh(f"x{n.level}", ctx)
        ctx2 = ctx + (x,)
        return Cycle((x,), _embed(n.body, ctx2, {**names, n.level: x}))
    raise TypeError(n)
