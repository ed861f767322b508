"""Finite equation systems for mu-terms and bisimilarity on them.

A mu-term denotes a regular tree with leaves labelled by markers.  We
compile it to a finite labelled transition system where every state also
carries the set of markers it exits to.  Two terms are equal in the
graph theory exactly when their roots are bisimilar.

States are created for every closure ``(subterm, binder environment)``.
Sums, bound variables and binders do not produce transitions of their own;
they *include* the behaviour of other states.  The behaviour of a state is
the least solution of those inclusions, which gives ``mu x. x = 0`` and
``mu x. (x + y) = y`` for free.
"""
from __future__ import annotations

from collections import defaultdict, deque

from .errors import UncalTypeError
from .normalize import App, BVar, Mu, Plus, Var, Zero, normalize_vec, to_mu


class EqSystem:
    """A labelled transition system with marker exits.

    Build with :meth:`new_state`, :meth:`add_edge`, :meth:`add_exit` and
    :meth:`include`; transitions and exits are saturated lazily before any
    query.
    """

    def __init__(self):
        self._own = []      # direct transitions
        self._exits0 = []   # direct exits
        self._inc = []      # included states
        self._trans = None
        self._exits = None
        self.roots = []

    def __len__(self):
        return len(self._own)

    def new_state(self):
        self._own.append(set())
        self._exits0.append(set())
        self._inc.append(set())
        self._trans = None
        return len(self._own) - 1

    def add_edge(self, s, label, t):
        self._own[s].add((label, t))
        self._trans = None

    def add_exit(self, s, marker):
        self._exits0[s].add(marker)
        self._trans = None

    def include(self, s, t):
        if s != t:
            self._inc[s].add(t)
        self._trans = None

    def _saturate(self):
        n = len(self._own)
        trans = [set(x) for x in self._own]
        exits = [set(x) for x in self._exits0]
        users = defaultdict(list)
        for s in range(n):
            for t in self._inc[s]:
                users[t].append(s)
        work = deque(range(n))
        queued = [True] * n
        while work:
            t = work.popleft()
            queued[t] = False
            for s in users[t]:
                grew = False
                if not trans[t] <= trans[s]:
                    trans[s] |= trans[t]
                    grew = True
                if not exits[t] <= exits[s]:
                    exits[s] |= exits[t]
                    grew = True
                if grew and not queued[s]:
                    queued[s] = True
                    work.append(s)
        self._trans = [frozenset(x) for x in trans]
        self._exits = [frozenset(x) for x in exits]

    def trans(self, s):
        if self._trans is None:
            self._saturate()
        return self._trans[s]

    def exits(self, s):
        if self._trans is None:
            self._saturate()
        return self._exits[s]

    @property
    def states(self):
        return range(len(self._own))

    def reachable(self, roots):
        seen, stack = set(roots), list(roots)
        while stack:
            s = stack.pop()
            for _, t in self.trans(s):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    @classmethod
    def from_edges(cls, n, edges, exits=()):
        """Build an already-saturated system from explicit data."""
        sys = cls()
        for _ in range(n):
            sys.new_state()
        for s, label, t in edges:
            sys.add_edge(s, label, t)
        for s, y in exits:
            sys.add_exit(s, y)
        return sys

    def __repr__(self):
        return f"EqSystem({len(self)} states)"


def compile_mu(m, sys=None, free=None):
    """Compile ``m`` into ``sys`` (a new system by default); return (sys, root).

    ``free`` maps free variable names to existing states; such variables
    include that state's behaviour instead of exiting.
    """
    sys = sys if sys is not None else EqSystem()
    free = free or {}
    memo = {}
    keep = []

    def state_for(node, env):
        key = (id(node), env)
        s = memo.get(key)
        if s is None:
            s = sys.new_state()
            memo[key] = s
            keep.append(node)
            todo.append((s, node, env))
        return s

    todo = deque()
    root = state_for(m, ())
    while todo:
        s, node, env = todo.popleft()
        if isinstance(node, App):
            sys.add_edge(s, node.label, state_for(node.arg, env))
        elif isinstance(node, Var):
            if node.name in free:
                sys.include(s, free[node.name])
            else:
                sys.add_exit(s, node.name)
        elif isinstance(node, BVar):
            sys.include(s, dict(env)[node.ident])
        elif isinstance(node, Mu):
            inner = tuple(p for p in env if p[0] != node.ident) + ((node.ident, s),)
            sys.include(s, state_for(node.body, inner))
        elif isinstance(node, Plus):
            for it in node.items:
                sys.include(s, state_for(it, env))
        elif not isinstance(node, Zero):
            raise TypeError(f"not a mu-term: {node!r}")
    return sys, root


def compile(m):
    """The equation system of one mu-term, with its root recorded."""
    sys, root = compile_mu(m)
    sys.roots = [root]
    return sys


# -- partition refinement ------------------------------------------------------


def partition(sys, states=None):
    """Coarsest stable partition as a dict mapping state -> block id.

    Starts from the split by exit sets, then refines with (label, block)
    splitters until no block can be split any more.
    """
    states = sorted(sys.states if states is None else states)
    pred = defaultdict(lambda: defaultdict(set))
    for s in states:
        for label, t in sys.trans(s):
            pred[t][label].add(s)

    by_exit = defaultdict(set)
    for s in states:
        by_exit[sys.exits(s)].add(s)
    blocks = list(by_exit.values())
    block_of = {}
    for i, b in enumerate(blocks):
        for s in b:
            block_of[s] = i

    work = deque(range(len(blocks)))
    pending = set(work)
    while work:
        b = work.popleft()
        pending.discard(b)
        splitter = list(blocks[b])
        hits = defaultdict(set)
        for t in splitter:
            for label, ss in pred[t].items():
                hits[label] |= ss
        for label in sorted(hits, key=repr):
            touched = defaultdict(set)
            for s in hits[label]:
                touched[block_of[s]].add(s)
            for c, inside in touched.items():
                if len(inside) == len(blocks[c]):
                    continue
                blocks[c] -= inside
                new = len(blocks)
                blocks.append(inside)
                for s in inside:
                    block_of[s] = new
                for x in (c, new):
                    if x not in pending:
                        pending.add(x)
                        work.append(x)
    return block_of


def bisimilar(sys, s1, s2) -> bool:
    if s1 == s2:
        return True
    block_of = partition(sys, sys.reachable([s1, s2]))
    return block_of[s1] == block_of[s2]


def naive_bisim(sys, states=None):
    """Greatest bisimulation as a set of pairs, by plain relation pruning."""
    states = sorted(sys.states if states is None else states)
    rel = {(s, t) for s in states for t in states if sys.exits(s) == sys.exits(t)}

    def covered(a, b):
        for label, a2 in sys.trans(a):
            if not any(l2 == label and (a2, b2) in rel for l2, b2 in sys.trans(b)):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for pair in list(rel):
            s, t = pair
            if not (covered(s, t) and covered(t, s)):
                rel.discard(pair)
                changed = True
    return rel


def moore_levels(sys, states=None):
    """Class ids per refinement round (bisimilarity up to depth d).

    Returns a list of dicts; the last one is stable and equals bisimilarity.
    """
    states = sorted(sys.states if states is None else states)
    ids = {}
    cur = {s: ids.setdefault(sys.exits(s), len(ids)) for s in states}
    levels = [cur]
    while True:
        ids = {}
        nxt = {}
        for s in states:
            sig = (cur[s], frozenset((label, cur[t]) for label, t in sys.trans(s)))
            nxt[s] = ids.setdefault(sig, len(ids))
        if len(ids) == len(set(cur.values())):
            return levels
        levels.append(nxt)
        cur = nxt


def witness(sys, s1, s2):
    """A label path leading from ``s1``/``s2`` to visibly different behaviour.

    Returns ``None`` if the states are bisimilar.  The path ends where the
    exits differ or where one side has no successor with the next label.
    """
    levels = moore_levels(sys, sys.reachable([s1, s2]))
    if levels[-1][s1] == levels[-1][s2]:
        return None

    def first_split(a, b):
        return next(i for i, lv in enumerate(levels) if lv[a] != lv[b])

    path = []
    a, b = s1, s2
    d = first_split(a, b)
    while d > 0:
        below = levels[d - 1]
        step = _unmatched(sys, a, b, below)
        if step is None:
            step = _unmatched(sys, b, a, below)
        label, a2, others = step
        path.append(label)
        if not others:
            break
        a, b = a2, others[0]
        d = first_split(a, b)
    return path


def _unmatched(sys, a, b, level):
    for label, a2 in sorted(sys.trans(a), key=repr):
        bs = sorted(t for l2, t in sys.trans(b) if l2 == label)
        if not any(level[a2] == level[t] for t in bs):
            return label, a2, bs
    return None


# -- bounded unfolding -----------------------------------------------------------


class SetTree:
    """Hash-consed finite tree: exit markers plus a set of labelled children.

    Nodes are interned in a table, so two trees are equal iff they are the
    same object.
    """

    __slots__ = ("exits", "children", "__weakref__")

    def __init__(self, exits, children):
        self.exits = exits
        self.children = children

    def to_data(self):
        kids = sorted(((repr(l), c.to_data()) for l, c in self.children), key=repr)
        return {"exits": sorted(self.exits), "children": kids}

    def __repr__(self):
        return f"SetTree({sorted(self.exits)}, {len(self.children)} children)"


def _intern(table, exits, children):
    key = (exits, children)
    node = table.get(key)
    if node is None:
        node = table[key] = SetTree(exits, children)
    return node


def unfold_all(sys, depth, states=None, table=None):
    """Depth-truncated unfoldings of all ``states`` in one shared table."""
    table = {} if table is None else table
    states = sorted(sys.states if states is None else states)
    cur = {s: _intern(table, sys.exits(s), frozenset()) for s in states}
    for _ in range(depth):
        cur = {
            s: _intern(table, sys.exits(s), frozenset((label, cur[t]) for label, t in sys.trans(s)))
            for s in states
        }
    return cur


def bounded_unfold(sys, s, depth, table=None):
    return unfold_all(sys, depth, sys.reachable([s]), table)[s]


# -- deciding term equality ---------------------------------------------------------


def _check_same_type(t1, t2):
    if len(t1.tgt) != len(t2.tgt):
        raise UncalTypeError(
            "eq", f"cannot compare terms with {len(t1.tgt)} and {len(t2.tgt)} roots"
        )


def term_system(*terms, strategy="default"):
    """Compile all roots of ``terms`` into one system; return (sys, roots per term)."""
    sys = EqSystem()
    roots = []
    for t in terms:
        rs = []
        for n in normalize_vec(t, strategy):
            _, r = compile_mu(to_mu(n), sys)
            rs.append(r)
        roots.append(rs)
    return sys, roots


def decide_equal(t1, t2) -> bool:
    """Whether two terms with the same number of roots are graph-equal."""
    _check_same_type(t1, t2)
    sys, (r1, r2) = term_system(t1, t2)
    if not r1:
        return True
    reach = sys.reachable(r1 + r2)
    block_of = partition(sys, reach)
    return all(block_of[a] == block_of[b] for a, b in zip(r1, r2))


def compare(t1, t2):
    """Like :func:`decide_equal` but also return a witness.

    The result is ``(True, None)`` or ``(False, (root index, label path))``.
    """
    _check_same_type(t1, t2)
    sys, (r1, r2) = term_system(t1, t2)
    for i, (a, b) in enumerate(zip(r1, r2)):
        path = witness(sys, a, b)
        if path is not None:
            return False, (i, path)
    return True, None
