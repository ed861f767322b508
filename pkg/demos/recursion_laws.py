"""Structural recursion and when it commutes with composition and cycles.

Run:  python demos/recursion_laws.py
"""
from pathlib import Path

from uncal import apply_phi, compile_sfun, decide_equal, parse_program, parse_term, print_term, run_query
from uncal.structrec import minimal
from uncal.syntax import Compose, Cycle, subst_all

DATA = Path(__file__).parent / "data"

relabel = compile_sfun(parse_program("sfun f2(L:T) = a:f2(T)").block_of("f2"))
for text in ["b:cycle(c:&)", "a:(b:x | c:x) @ cycle(x := d:(p:y1 | q:y2 | r:x))"]:
    out = run_query(relabel, "f2", parse_term(text))
    print(f"f2({text}) = {print_term(out)}")

# aa? asks whether the input has a path a.a; it is built from two
# mutually recursive functions, so each call really returns a pair
prog = parse_program((DATA / "aa.unql").read_text())
aa = compile_sfun(prog.block_of("aa?"))
q = lambda text: run_query(aa, "aa?", parse_term(text))

print("\naa? on a glued graph versus gluing the answers:")
whole = q("(a:&) @ (a:{})")
glued = Compose(q("a:&"), q("a:{}"))
print("  aa?((a:&) @ (a:{}))       =", print_term(minimal(whole)))
print("  aa?(a:&) @ aa?(a:{})      =", print_term(minimal(glued)))

print("\naa? on a loop versus looping the answer:")
loop = q("cycle(a:&)")
looped = Cycle(("&",), q("a:&"))
print("  aa?(cycle(a:&))           =", print_term(minimal(loop)))
print("  cycle(aa?(a:&))           =", print_term(minimal(looped)))

# keeping both components repairs the composition law
vs, vt = apply_phi(aa, parse_term("a:z", ("z",))), apply_phi(aa, parse_term("a:{}"))
print("\nper component, aa?(a:z) is", [print_term(v) for v in vs])
print("and aa?(a:{}) is", [print_term(v) for v in vt])
# plug both components of aa?(a:{}) (and the input itself, for the tail) into z
ctx = vt[0].src
composed = [subst_all(v, dict(zip(v.src, list(vt) + [parse_term("a:{}")])), ctx) for v in vs]
print("composing the vectors gives aa? =", print_term(minimal(composed[1])),
      "which matches", print_term(minimal(whole)), ":", decide_equal(composed[1], whole))
