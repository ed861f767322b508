"""Structural recursion over graphs.

A block of ``k`` mutually recursive ``sfun`` definitions becomes, for each
edge label, a ``k``-vector of bodies in normal form over the holes
``$v0 .. $v{k-1}`` (the recursive results on the tail) and ``$r`` (the tail
itself).  Applying a block to a term works on the finite transition system
of the input's normal form:

* every input state ``a`` gets ``k`` result states, ``main[a][i]``; the
  input state itself serves as the history copy;
* an input edge ``(a, l, b)`` instantiates the ``i``-th body for ``l`` at
  ``main[a][i]``, wiring ``$vj`` to ``main[b][j]`` and ``$r`` to ``b``;
* an exit ``y`` of ``a`` becomes the exit ``y.i`` of ``main[a][i]`` (just
  ``y`` when ``k = 1``); the tail keeps the exit ``y`` itself.

Cycles need no special treatment because the system is finite.  A second,
independent evaluator recurses over the mu-term directly and solves each
binder as a simultaneous fixpoint; the two are cross-checked in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from sys import getrecursionlimit, setrecursionlimit

from .bisim import EqSystem, compile_mu, partition
from .errors import CompileError, UncalTypeError
from .normalize import (
    App,
    BVar,
    Mu,
    Plus,
    Var,
    Zero,
    canon_mu,
    embed,
    fresh_id,
    from_mu,
    mu_subst,
    mu_vector,
    normalize,
    normalize_vec,
    plus,
    to_mu,
)

TAIL = "$r"


def hole(j):
    return f"$v{j}"


def exit_name(y, i, k):
    return y if k == 1 else f"{y}.{i + 1}"


@dataclass
class SfunBlock:
    """A compiled block of mutually recursive functions."""

    names: tuple
    defs: tuple
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def k(self):
        return len(self.names)

    def index(self, name):
        return self.names.index(name)

    def action(self, label):
        """The k bodies for ``label`` as mu-terms over the holes."""
        got = self._cache.get(label)
        if got is None:
            got = tuple(_body_mu(d.body, label, self.names, d.name) for d in self.defs)
            self._cache[label] = got
        return got

    def uses_tail(self):
        return any(d.uses_tail() for d in self.defs)

    def instantiate(self, label, vs, r):
        """``e_label(vs, r)`` as mu-terms, for mu-term arguments."""
        env = {hole(j): v for j, v in enumerate(vs)}
        env[TAIL] = r
        return [canon_mu(mu_subst(b, env)) for b in self.action(label)]


def _body_mu(b, label, names, owner):
    kind = b[0]
    if kind == "if":
        return _body_mu(b[2] if label == b[1] else b[3], label, names, owner)
    if kind == "union":
        return plus(_body_mu(it, label, names, owner) for it in b[1])
    if kind == "edge":
        return App(label if b[1] is None else b[1], _body_mu(b[2], label, names, owner))
    if kind == "nil":
        return Zero()
    if kind == "call":
        return Var(hole(names.index(b[1])))
    if kind == "tail":
        return Var(TAIL)
    if kind == "mark":
        raise CompileError(f"{owner}: marker {b[1]} cannot appear in a function body")
    raise CompileError(f"{owner}: unsupported body form {kind}")


def compile_sfun(block) -> SfunBlock:
    """Compile a list of parsed definitions (one call-graph component)."""
    block = list(block)
    if not block:
        raise CompileError("empty sfun block")
    names = tuple(d.name for d in block)
    for d in block:
        for g in d.calls():
            if g not in names:
                raise CompileError(f"{d.name} calls {g}, which is outside its block")
    sb = SfunBlock(names, tuple(block))
    # probe one label so malformed bodies are reported at compile time
    sb.action(object())
    return sb


# -- the product construction ----------------------------------------------------


def product_system(block: SfunBlock, sys: EqSystem, roots, rename=None):
    """Add the result states for ``roots`` to ``sys``; return their k-vectors.

    ``rename(y, i)`` gives the exit name used for marker ``y`` in component
    ``i``.
    """
    k = block.k
    rename = rename or (lambda y, i: exit_name(y, i, k))
    orig = sorted(sys.reachable(roots))
    trans = {a: sorted(sys.trans(a), key=_edge_key) for a in orig}
    exits = {a: sorted(sys.exits(a)) for a in orig}
    main = {a: [sys.new_state() for _ in range(k)] for a in orig}
    inst = {}
    for a in orig:
        for i in range(k):
            for y in exits[a]:
                sys.add_exit(main[a][i], rename(y, i))
        for label, b in trans[a]:
            for i in range(k):
                key = (label, i, b)
                s = inst.get(key)
                if s is None:
                    free = {hole(j): main[b][j] for j in range(k)}
                    free[TAIL] = b
                    _, s = compile_mu(block.action(label)[i], sys, free)
                    inst[key] = s
                sys.include(main[a][i], s)
    return [main[r] for r in roots]


def _edge_key(e):
    label, t = e
    return (type(label).__name__, str(label), t)


def readback_mu(sys: EqSystem, root):
    """A mu-term for the regular tree at ``root``.

    The system is first quotiented by bisimilarity; binders are introduced
    at the back-edges of a depth-first traversal.
    """
    reach = sys.reachable([root])
    block_of = partition(sys, reach)
    rep = {}
    for s in sorted(reach):
        rep.setdefault(block_of[s], s)

    active = {}
    used = set()

    def go(s):
        b = block_of[s]
        if b in active:
            used.add(b)
            return BVar(active[b])
        ident = fresh_id()
        active[b] = ident
        r = rep[b]
        items = [Var(y) for y in sorted(sys.exits(r))]
        seen = set()
        for label, t in sorted(sys.trans(r), key=_edge_key):
            if (label, block_of[t]) in seen:
                continue
            seen.add((label, block_of[t]))
            items.append(App(label, go(t)))
        del active[b]
        body = plus(items)
        if b in used:
            used.discard(b)
            return Mu(ident, body)
        return body

    return canon_mu(_with_deep_stack(go, root))


def _with_deep_stack(fn, arg):
    limit = getrecursionlimit()
    setrecursionlimit(max(limit, 20000))
    try:
        return fn(arg)
    finally:
        setrecursionlimit(limit)


def readback(sys: EqSystem, root, src=None):
    """Read a state back as a single-rooted term over ``src``."""
    return embed(from_mu(readback_mu(sys, root)), src)


def minimal(t):
    """The least representative of a single-rooted term's equality class."""
    sys, s = compile_mu(to_mu(normalize(t)))
    return readback(sys, s, t.src)


def result_src(t, k):
    """Leaves of a result: the split markers, then (through the tail) the originals."""
    if k == 1:
        return tuple(t.src)
    return tuple(exit_name(y, i, k) for y in t.src for i in range(k)) + tuple(t.src)


def apply_phi_vec(block: SfunBlock, t):
    """One k-vector of result terms per root of ``t``."""
    sys = EqSystem()
    roots = [compile_mu(to_mu(n), sys)[1] for n in normalize_vec(t)] if t.tgt else []
    vectors = product_system(block, sys, roots)
    src = result_src(t, block.k)
    return [[readback(sys, s, src) for s in vec] for vec in vectors]


def apply_phi(block: SfunBlock, t):
    """The k-vector of results for a single-rooted term."""
    if len(t.tgt) != 1:
        raise UncalTypeError("phi", f"expected one root, got {len(t.tgt)}; use apply_phi_vec", t)
    return apply_phi_vec(block, t)[0]


def run_query(block: SfunBlock, name: str, t):
    """The result of calling ``name`` on ``t``, over the markers of ``t``.

    The per-component exit names are merged back into the original ones.
    """
    i = block.index(name)
    sys = EqSystem()
    _, root = compile_mu(to_mu(normalize(t)), sys)
    (vec,) = product_system(block, sys, [root], rename=lambda y, j: y)
    return readback(sys, vec[i], t.src)


# -- direct recursion on mu-terms -----------------------------------------------


def phi_mu(block: SfunBlock, m, env=None):
    """The k result mu-terms and the history for ``m``, by direct recursion."""
    k = block.k
    env = env or {}

    def go(m, env):
        if isinstance(m, Var):
            return [Var(exit_name(m.name, i, k)) for i in range(k)], m
        if isinstance(m, BVar):
            ids = env[m.ident]
            return [BVar(x) for x in ids[:k]], BVar(ids[k])
        if isinstance(m, Zero):
            return [Zero()] * k, m
        if isinstance(m, Plus):
            parts = [go(it, env) for it in m.items]
            vec = [plus(p[0][i] for p in parts) for i in range(k)]
            return vec, Plus(tuple(p[1] for p in parts))
        if isinstance(m, App):
            vs, r = go(m.arg, env)
            env2 = {hole(j): v for j, v in enumerate(vs)}
            env2[TAIL] = r
            return [mu_subst(b, env2) for b in block.action(m.label)], App(m.label, r)
        if isinstance(m, Mu):
            ids = [fresh_id() for _ in range(k + 1)]
            vs, r = go(m.body, {**env, m.ident: ids})
            sol = mu_vector(ids, vs + [r])
            return sol[:k], sol[k]
        raise TypeError(m)

    vec, hist = go(m, env)
    return [canon_mu(v) for v in vec], canon_mu(hist)


def apply_phi_direct(block: SfunBlock, t):
    """Same shape as :func:`apply_phi_vec`, via :func:`phi_mu`."""
    src = result_src(t, block.k)
    out = []
    for n in normalize_vec(t) if t.tgt else []:
        vec, _ = phi_mu(block, to_mu(n))
        out.append([embed(from_mu(v), src) for v in vec])
    return out
