"""Typed UnCAL terms.

Every constructor checks its typing rule eagerly, so a :class:`Term` value
always carries its judgment ``src -> tgt``.  Contexts are tuples of marker
names.  Vertical composition ``s @ t`` connects the roots of ``t`` with the
leaves of ``s`` *positionally*; names only matter for resolving marker
references and for printing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, fields
from typing import Iterable, Union

from .errors import ArityError, SubstError, UncalTypeError

DEFAULT = "&"

Context = tuple
Label = Union[str, int]

_AUTO_NAME = re.compile(r"^&\d*$")


def check_context(ctx, rule="Ctx", term=None) -> tuple:
    ctx = tuple(ctx)
    for name in ctx:
        if not isinstance(name, str) or not name:
            raise UncalTypeError(rule, f"bad marker {name!r}", term)
    if len(set(ctx)) != len(ctx):
        raise UncalTypeError(rule, f"markers not pairwise distinct in <{','.join(ctx)}>", term)
    return ctx


def fresh(name: str, avoid) -> str:
    while name in avoid:
        name += "'"
    return name


def show_context(ctx) -> str:
    return "<" + ",".join(ctx) + ">"


@dataclass(frozen=True)
class GraphType:
    source: tuple
    target: tuple

    def __str__(self):
        return f"{show_context(self.source)} -> {show_context(self.target)}"


class Term:
    """Base class; subclasses set ``src`` and ``tgt`` in ``__post_init__``."""

    src: tuple
    tgt: tuple

    def _key(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def _set(self, src, tgt):
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)

    @property
    def type(self) -> GraphType:
        return GraphType(self.src, self.tgt)

    def __str__(self):
        from .surface import print_term

        return print_term(self)


@dataclass(frozen=True, eq=False)
class MarkerRef(Term):
    name: str
    ctx: tuple

    def __post_init__(self):
        ctx = check_context(self.ctx, "Mark", self)
        if self.name not in ctx:
            raise UncalTypeError("Mark", f"marker {self.name} not in source {show_context(ctx)}", self)
        self._set(ctx, (DEFAULT,))


@dataclass(frozen=True, eq=False)
class Edge(Term):
    label: Label
    body: Term

    def __post_init__(self):
        if len(self.body.tgt) != 1:
            raise UncalTypeError("Label", "edge body must have a single root", self)
        self._set(self.body.src, (DEFAULT,))


@dataclass(frozen=True, eq=False)
class Compose(Term):
    left: Term
    right: Term

    def __post_init__(self):
        if len(self.left.src) != len(self.right.tgt):
            raise UncalTypeError(
                "Com",
                f"middle context mismatch: {show_context(self.left.src)} vs {show_context(self.right.tgt)}",
                self,
            )
        self._set(self.right.src, self.left.tgt)


def pair_target_names(name_lists, def_flags, term=None):
    """Concatenate component roots, renaming clashing default markers.

    A clash involving a user-declared marker (a ``Def`` component) is an
    error; other clashes are resolved by positional names ``&1, &2, ...``.
    """
    names = [n for lst in name_lists for n in lst]
    if len(set(names)) == len(names):
        return tuple(names)
    counts = {}
    for n in names:
        counts[n] = counts.get(n, 0) + 1
    owners = [flag for lst, flag in zip(name_lists, def_flags) for _ in lst]
    for n, is_def in zip(names, owners):
        if counts[n] > 1 and is_def:
            raise UncalTypeError("Pair", f"duplicate target marker {n}", term)
    renamed = [f"&{i + 1}" if counts[n] > 1 or _AUTO_NAME.match(n) else n for i, n in enumerate(names)]
    if len(set(renamed)) != len(renamed):
        renamed = [f"&{i + 1}" for i in range(len(names))]
    return tuple(renamed)


def _pair_target(items, term):
    return pair_target_names([it.tgt for it in items], [isinstance(it, Def) for it in items], term)


@dataclass(frozen=True, eq=False)
class Pair(Term):
    items: tuple

    def __post_init__(self):
        flat = []
        for it in self.items:
            flat.extend(it.items if isinstance(it, Pair) else (it,))
        flat = tuple(flat)
        object.__setattr__(self, "items", flat)
        if not flat:
            raise UncalTypeError("Pair", "empty pair (use Emp)", self)
        src = flat[0].src
        for it in flat[1:]:
            if it.src != src:
                raise UncalTypeError(
                    "Pair", f"components disagree on source: {show_context(src)} vs {show_context(it.src)}", self
                )
        self._set(src, _pair_target(flat, self))


@dataclass(frozen=True, eq=False)
class Cycle(Term):
    bound: tuple
    body: Term

    def __post_init__(self):
        bound = check_context(self.bound, "Cyc", self)
        object.__setattr__(self, "bound", bound)
        n = len(bound)
        src = self.body.src
        if len(src) < n or tuple(src[len(src) - n:]) != bound:
            raise UncalTypeError(
                "Cyc", f"body source {show_context(src)} does not end with {show_context(bound)}", self
            )
        if len(self.body.tgt) != n:
            raise UncalTypeError("Cyc", f"body has {len(self.body.tgt)} roots, cycle binds {n}", self)
        self._set(tuple(src[: len(src) - n]), bound)


@dataclass(frozen=True, eq=False)
class Nil(Term):
    ctx: tuple = ()

    def __post_init__(self):
        self._set(check_context(self.ctx, "Nil", self), (DEFAULT,))


@dataclass(frozen=True, eq=False)
class Emp(Term):
    ctx: tuple = ()

    def __post_init__(self):
        self._set(check_context(self.ctx, "Emp", self), ())


@dataclass(frozen=True, eq=False)
class Man(Term):
    ctx: tuple = ("&1", "&2")

    def __post_init__(self):
        ctx = check_context(self.ctx, "Man", self)
        if len(ctx) != 2:
            raise UncalTypeError("Man", f"man needs exactly two leaves, got {show_context(ctx)}", self)
        self._set(ctx, (DEFAULT,))


@dataclass(frozen=True, eq=False)
class Def(Term):
    name: str
    body: Term

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise UncalTypeError("Def", f"bad marker {self.name!r}", self)
        if len(self.body.tgt) != 1:
            raise UncalTypeError("Def", "defined body must have a single root", self)
        self._set(self.body.src, (self.name,))


def typecheck(t: Term) -> GraphType:
    """Return the judgment of ``t``.  Ill-typed terms cannot be built."""
    if not isinstance(t, Term):
        raise UncalTypeError("Term", f"not a term: {t!r}")
    return t.type


# -- smart constructors ------------------------------------------------------


def define(name: str, body: Term) -> Term:
    # t : Y -> <&> is identified with & := t
    if name == DEFAULT:
        return body
    return Def(name, body)


def anonymous(t: Term) -> Term:
    while isinstance(t, Def):
        t = t.body
    return t


def pair(items: Iterable[Term], ctx=None) -> Term:
    """Flattened pairing; ``<>``-rooted components are units and vanish.

    Components declaring the same marker lose their outer definition, which
    is harmless because composition is positional.
    """
    items = [x for it in items for x in (it.items if isinstance(it, Pair) else (it,))]
    if not items:
        if ctx is None:
            raise ArityError("empty pair needs an explicit source context")
        return Emp(tuple(ctx))
    kept = [it for it in items if it.tgt] or items[:1]
    if len(kept) == 1:
        return kept[0]
    names = [n for it in kept for n in it.tgt]
    if len(set(names)) != len(names):
        kept = [anonymous(it) for it in kept]
    return Pair(tuple(kept))


def union(s: Term, t: Term) -> Term:
    p = pair([s, t])
    return Compose(Man(p.tgt), p)


def union_all(items, ctx=()) -> Term:
    items = list(items)
    if not items:
        return Nil(tuple(ctx))
    acc = items[0]
    for it in items[1:]:
        acc = union(acc, it)
    return acc


def ident(ctx) -> Term:
    ctx = tuple(ctx)
    return pair([MarkerRef(x, ctx) for x in ctx], ctx)


def projection(ctx, start, stop) -> Term:
    ctx = tuple(ctx)
    return pair([MarkerRef(x, ctx) for x in ctx[start:stop]], ctx)


def _disjoint_concat(a, b):
    out = list(a)
    for x in b:
        out.append(fresh(x, out))
    return tuple(out)


def product(*terms: Term) -> Term:
    """``t1 x ... x tn``: run the factors side by side."""
    if not terms:
        raise ArityError("product needs at least one factor")
    ctx = ()
    for t in terms:
        ctx = _disjoint_concat(ctx, t.src)
    parts, pos = [], 0
    for t in terms:
        n = len(t.src)
        parts.append(Compose(t, projection(ctx, pos, pos + n)))
        pos += n
    return pair(parts, ctx)


def dup(ctx) -> Term:
    return pair([ident(ctx), ident(ctx)], ctx)


def swap(a, b) -> Term:
    ctx = _disjoint_concat(tuple(a), tuple(b))
    n = len(a)
    return pair([projection(ctx, n, len(ctx)), projection(ctx, 0, n)], ctx)


def diag(m: int) -> Term:
    """``Delta_m : <&> -> m`` (m copies of the single root)."""
    return pair([MarkerRef(DEFAULT, (DEFAULT,))] * m, (DEFAULT,))


_ABBREVS = {
    "union": (union, 2),
    "pi1": (lambda a, b: projection(_disjoint_concat(a, b), 0, len(a)), 2),
    "pi2": (lambda a, b: projection(_disjoint_concat(a, b), len(a), len(a) + len(b)), 2),
    "product": (product, None),
    "id": (ident, 1),
    "dup": (dup, 1),
    "swap": (swap, 2),
}


def mk_abbrev(kind: str, *args) -> Term:
    try:
        fn, arity = _ABBREVS[kind]
    except KeyError:
        raise ArityError(f"unknown abbreviation {kind!r}") from None
    if arity is not None and len(args) != arity:
        raise ArityError(f"{kind} takes {arity} arguments, got {len(args)}")
    return fn(*args)


# -- markers and substitution -----------------------------------------------


def free_markers(t: Term) -> set:
    if isinstance(t, MarkerRef):
        return {t.name}
    if isinstance(t, Man):
        return set(t.ctx)
    if isinstance(t, (Nil, Emp)):
        return set()
    if isinstance(t, (Edge, Def)):
        return free_markers(t.body)
    if isinstance(t, Compose):
        return free_markers(t.right)
    if isinstance(t, Pair):
        out = set()
        for it in t.items:
            out |= free_markers(it)
        return out
    if isinstance(t, Cycle):
        return free_markers(t.body) - set(t.bound)
    raise TypeError(t)


def lift(v: Term, ctx2) -> Term:
    """Weaken ``v`` to a larger source context whose prefix is ``v.src``."""
    ctx2 = tuple(ctx2)
    if v.src == ctx2:
        return v
    return subst_all(v, {z: MarkerRef(z, ctx2) for z in v.src}, ctx2)


def subst_all(t: Term, env: dict, ctx) -> Term:
    """Replace every source marker of ``t`` by ``env[name]`` (a term over ``ctx``)."""
    return _subst(t, env, tuple(ctx), {})


def _image(env, name, ctx, cache):
    # images are lifted under binders only where they are used
    v = env[name]
    if v.src == ctx:
        return v
    key = (id(v), ctx)
    got = cache.get(key)
    if got is None:
        got = cache[key] = (lift(v, ctx), v)
    return got[0]


def _subst(t, env, ctx, cache):
    if isinstance(t, MarkerRef):
        # a marker is rooted at &, so an outer definition on its image is dropped
        return anonymous(_image(env, t.name, ctx, cache))
    if isinstance(t, Nil):
        return Nil(ctx)
    if isinstance(t, Emp):
        return Emp(ctx)
    if isinstance(t, Man):
        a, b = _image(env, t.ctx[0], ctx, cache), _image(env, t.ctx[1], ctx, cache)
        if (
            isinstance(a, MarkerRef)
            and isinstance(b, MarkerRef)
            and (a.name, b.name) == ctx
        ):
            return Man(ctx)
        p = pair([a, b])
        return Compose(Man(p.tgt), p)
    if isinstance(t, Edge):
        return Edge(t.label, _subst(t.body, env, ctx, cache))
    if isinstance(t, Def):
        return Def(t.name, _subst(t.body, env, ctx, cache))
    if isinstance(t, Compose):
        return Compose(t.left, _subst(t.right, env, ctx, cache))
    if isinstance(t, Pair):
        return pair([_subst(it, env, ctx, cache) for it in t.items], ctx)
    if isinstance(t, Cycle):
        bound = []
        for x in t.bound:
            bound.append(fresh(x, set(ctx) | set(bound)))
        ctx2 = ctx + tuple(bound)
        env2 = dict(env)
        for x, x2 in zip(t.bound, bound):
            env2[x] = MarkerRef(x2, ctx2)
        return Cycle(tuple(bound), _subst(t.body, env2, ctx2, cache))
    raise TypeError(t)


def substitute(t: Term, sigma: dict, rest=None) -> Term:
    """``t[y1 -> s1, ..., yk -> sk]`` with result source ``Z ++ Y'``.

    ``Y'`` lists the markers of ``t.src`` not in ``sigma`` (in order); pass
    ``rest`` to assert it.  All ``s_i`` must share one source ``Z`` and have
    a single root.
    """
    dom = [y for y in t.src if y in sigma]
    if len(dom) != len(sigma):
        missing = sorted(set(sigma) - set(t.src))
        raise SubstError(f"markers {missing} are not in the source {show_context(t.src)}")
    complement = tuple(y for y in t.src if y not in sigma)
    if rest is not None and tuple(rest) != complement:
        raise SubstError(f"complement is {show_context(complement)}, not {show_context(rest)}")
    images = list(sigma.values())
    z = images[0].src if images else ()
    for s in images:
        if s.src != z:
            raise SubstError("substituted terms must share one source context")
        if len(s.tgt) != 1:
            raise SubstError("substituted terms must have a single root")
    if set(z) & set(complement):
        raise SubstError(f"{show_context(z)} and {show_context(complement)} overlap")
    ctx = z + complement
    env = {y: lift(s, ctx) for y, s in sigma.items()}
    for y in complement:
        env[y] = MarkerRef(y, ctx)
    return subst_all(t, env, ctx)


def rename_source(t: Term, names) -> Term:
    """Positionally rename the source context of ``t``."""
    names = check_context(names)
    if len(names) != len(t.src):
        raise SubstError("renaming must preserve the source length")
    if names == t.src:
        return t
    return subst_all(t, {old: MarkerRef(new, names) for old, new in zip(t.src, names)}, names)


def term_size(t: Term) -> int:
    if isinstance(t, (Edge, Def, Cycle)):
        return 1 + term_size(t.body)
    if isinstance(t, Compose):
        return 1 + term_size(t.left) + term_size(t.right)
    if isinstance(t, Pair):
        return 1 + sum(term_size(it) for it in t.items)
    return 1


def labels_of(t: Term) -> set:
    if isinstance(t, Edge):
        return {t.label} | labels_of(t.body)
    if isinstance(t, (Def, Cycle)):
        return labels_of(t.body)
    if isinstance(t, Compose):
        return labels_of(t.left) | labels_of(t.right)
    if isinstance(t, Pair):
        return set().union(*(labels_of(it) for it in t.items))
    return set()


def map_labels(t: Term, fn) -> Term:
    if isinstance(t, Edge):
        return Edge(fn(t.label), map_labels(t.body, fn))
    if isinstance(t, Def):
        return Def(t.name, map_labels(t.body, fn))
    if isinstance(t, Cycle):
        return Cycle(t.bound, map_labels(t.body, fn))
    if isinstance(t, Compose):
        return Compose(map_labels(t.left, fn), map_labels(t.right, fn))
    if isinstance(t, Pair):
        return Pair(tuple(map_labels(it, fn) for it in t.items))
    return t
