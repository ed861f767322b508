"""Cyclic graphs: unfolding, normal forms and distinguishing paths.

Run:  python demos/cycles.py
"""
from uncal import compare, decide_equal, normalize, parse_term, print_term, to_mu, typecheck
from uncal.normalize import show_mu
from uncal.structrec import minimal

loop = parse_term("cycle(& := a:&)")
chain = [loop, parse_term("a:cycle(& := a:&)"), parse_term("a:a:cycle(& := a:&)")]
print("an a-loop and two unfoldings of it:")
for t in chain:
    print(f"  {print_term(t):28} mu-term: {show_mu(to_mu(normalize(t)))}")
print("  all equal:", all(decide_equal(chain[0], t) for t in chain[1:]))

# a graph with two open leaves and an internal cycle through x
tg = parse_term("a:(b:x | c:x) @ cycle(x := d:(p:y1 | q:y2 | r:x))")
print("\ngraph:", print_term(tg))
print("type:", typecheck(tg))
print("normal form as a mu-term:", show_mu(to_mu(normalize(tg))))

# the empty loop has no edges at all
print("\ncycle(& := &) is", print_term(minimal(parse_term("cycle(& := &)"))))

# when two graphs differ, a label path shows where
ok, (root, path) = compare(parse_term("cycle(& := a:b:&)"), parse_term("cycle(& := a:b:a:c:&)"))
print("\ncycle(a:b:&) vs cycle(a:b:a:c:&): equal =", ok, " differ after", ":".join(path))
