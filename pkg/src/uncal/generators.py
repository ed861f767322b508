"""Random well-typed terms, transition systems and sfun programs.

Everything takes an explicit :class:`random.Random` so runs are
reproducible from a seed.
"""
from __future__ import annotations

import random

from .bisim import EqSystem
from .syntax import (
    Compose,
    Cycle,
    Def,
    Edge,
    Emp,
    Man,
    MarkerRef,
    Nil,
    define,
    fresh,
    pair,
    union,
)

LABELS = ("a", "b", "c")


def _fresh_names(k, avoid, stem="z"):
    out = []
    for i in range(k):
        out.append(fresh(f"{stem}{i}", set(avoid) | set(out)))
    return tuple(out)


def random_term(rng: random.Random, src=(), roots=1, depth=3, labels=LABELS):
    """A random term of type ``src -> <roots markers>``."""
    src = tuple(src)
    if roots == 0:
        return Emp(src)
    if roots > 1:
        choice = rng.random()
        if depth <= 0 or choice < 0.6:
            cut = rng.randint(1, roots - 1)
            left = random_term(rng, src, cut, depth - 1, labels)
            right = random_term(rng, src, roots - cut, depth - 1, labels)
            return pair([left, right])
        if choice < 0.8:
            bound = _fresh_names(roots, src, "x")
            body = random_term(rng, src + bound, roots, depth - 1, labels)
            return Cycle(bound, body)
        mid = rng.randint(0, 2)
        right = random_term(rng, src, mid, depth - 1, labels)
        names = right.tgt
        return Compose(random_term(rng, names, roots, depth - 1, labels), right)
    return _rooted(rng, src, depth, labels)


def _rooted(rng, src, depth, labels):
    leaves = ["nil"] + (["mark"] if src else [])
    if depth <= 0:
        kind = rng.choice(leaves + ["edge0"])
    else:
        kinds = ["nil", "edge", "union", "compose", "cycle", "cycle2", "def"]
        weights = [1, 5, 3, 2, 2, 1, 1]
        if src:
            kinds.append("mark")
            weights.append(2)
        kind = rng.choices(kinds, weights=weights)[0]
    if kind == "nil":
        return Nil(src)
    if kind == "mark":
        return MarkerRef(rng.choice(src), src)
    if kind == "edge0":
        return Edge(rng.choice(labels), Nil(src) if not src or rng.random() < 0.5 else MarkerRef(rng.choice(src), src))
    if kind == "edge":
        return Edge(rng.choice(labels), _rooted(rng, src, depth - 1, labels))
    if kind == "union":
        return union(_rooted(rng, src, depth - 1, labels), _rooted(rng, src, depth - 1, labels))
    if kind == "compose":
        mid = rng.randint(0, 2)
        right = random_term(rng, src, mid, depth - 1, labels)
        left = _rooted(rng, right.tgt, depth - 1, labels)
        return Compose(left, right)
    if kind == "cycle":
        (x,) = _fresh_names(1, src, "x")
        body = _rooted(rng, src + (x,), depth - 1, labels)
        if rng.random() < 0.5:
            body = Def(x, body)
        return Cycle((x,), body)
    if kind == "cycle2":
        bound = _fresh_names(2, src, "x")
        body = random_term(rng, src + bound, 2, depth - 1, labels)
        cyc = Cycle(bound, body)
        if rng.random() < 0.5:
            return Compose(Man(cyc.tgt), cyc)
        return Compose(MarkerRef(rng.choice(bound), bound), cyc)
    if kind == "def":
        return define(rng.choice(["&", "w"]), _rooted(rng, src, depth - 1, labels))
    raise AssertionError(kind)


def random_tree(rng, depth=3, width=2, labels=LABELS, leaves=()):
    """A random term built from edges, unions, nil and leaf markers only."""
    src = tuple(leaves)
    if depth <= 0 or rng.random() < 0.2:
        if src and rng.random() < 0.5:
            return MarkerRef(rng.choice(src), src)
        return Nil(src)
    n = rng.randint(1, width)
    items = [Edge(rng.choice(labels), random_tree(rng, depth - 1, width, labels, leaves)) for _ in range(n)]
    acc = items[0]
    for it in items[1:]:
        acc = union(acc, it)
    return acc


# -- transition systems ----------------------------------------------------------


def random_system(rng, n=None, labels=("a", "b"), markers=("y",), density=0.15):
    """Either a plain random system or a fibred one with many bisimilar states."""
    n = n or rng.randint(1, 30)
    if rng.random() < 0.5 or n < 4:
        edges = [
            (s, rng.choice(labels), t)
            for s in range(n)
            for t in range(n)
            if rng.random() < density
        ]
        exits = [(s, y) for s in range(n) for y in markers if rng.random() < 0.15]
        return EqSystem.from_edges(n, edges, exits)
    return fibred_system(rng, n, labels, markers)


def fibred_system(rng, n, labels=("a", "b"), markers=("y",)):
    """Copies of a small base system; each copy is bisimilar to its base state."""
    m = rng.randint(1, max(1, n // 3))
    base_edges = [(s, rng.choice(labels), t) for s in range(m) for t in range(m) if rng.random() < 0.4]
    base_exit = {s: {y for y in markers if rng.random() < 0.3} for s in range(m)}
    fib = list(range(m)) + [rng.randrange(m) for _ in range(n - m)]
    rng.shuffle(fib)
    over = {}
    for s, b in enumerate(fib):
        over.setdefault(b, []).append(s)
    edges, exits = [], []
    for s, b in enumerate(fib):
        for y in base_exit[b]:
            exits.append((s, y))
        for src, label, dst in base_edges:
            if src != b:
                continue
            choices = over[dst]
            for t in rng.sample(choices, rng.randint(1, len(choices))):
                edges.append((s, label, t))
    return EqSystem.from_edges(n, edges, exits)


# -- sfun programs -----------------------------------------------------------------


def random_body(rng, names, depth=2, tail=True, labels=("a", "b")):
    if depth <= 0:
        opts = ["nil", "call"] + (["tail"] if tail else [])
        kind = rng.choice(opts)
    else:
        kinds = ["nil", "call", "edge", "ledge", "union", "if"] + (["tail"] if tail else [])
        weights = [1, 3, 3, 1, 2, 2] + ([2] if tail else [])
        kind = rng.choices(kinds, weights=weights)[0]
    if kind == "nil":
        return "{}"
    if kind == "call":
        return f"{rng.choice(names)}(T)"
    if kind == "tail":
        return "T"
    if kind == "edge":
        return f"{rng.choice(labels)}:{random_body(rng, names, depth - 1, tail, labels)}"
    if kind == "ledge":
        return f"L:{random_body(rng, names, depth - 1, tail, labels)}"
    if kind == "union":
        a = random_body(rng, names, depth - 1, tail, labels)
        b = random_body(rng, names, depth - 1, tail, labels)
        return "{" + a + ", " + b + "}"
    if kind == "if":
        lit = rng.choice(labels)
        a = random_body(rng, names, depth - 1, tail, labels)
        b = random_body(rng, names, depth - 1, tail, labels)
        return f"(if L = {lit} then {a} else {b})"
    raise AssertionError(kind)


def random_program(rng, k=None, tail=True, labels=("a", "b")):
    """Source text of one block of ``k`` functions that all call each other."""
    k = k or rng.randint(1, 2)
    names = [f"g{i}" for i in range(k)]
    lines = []
    for i, name in enumerate(names):
        body = random_body(rng, names, 2, tail, labels)
        # keep the block connected
        if k > 1:
            body = "{" + body + ", " + f"{names[(i + 1) % k]}(T)" + "}" if rng.random() < 0.5 or i == 0 else body
            if i > 0 and "g" not in body:
                body = "{" + body + f", {names[0]}(T)" + "}"
        lines.append(f"sfun {name}(L:T) = {body}")
    return "\n".join(lines)
