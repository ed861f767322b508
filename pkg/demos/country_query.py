"""Query a JSON document: collect every ethnic group under a result edge.

Run:  python demos/country_query.py
"""
from pathlib import Path

from uncal import compile_sfun, decide_equal, ingest_tree, parse_program, parse_term, print_term, run_query

DATA = Path(__file__).parent / "data"

doc = ingest_tree((DATA / "country.json").read_text())
print("document as a tree:")
print(" ", print_term(doc))

prog = parse_program((DATA / "f1.unql").read_text())
f1 = compile_sfun(prog.block_of("f1"))
result = run_query(f1, "f1", doc)
print("\nf1(document):")
print(" ", print_term(result))

# the three values appear once each even though the document lists them
# under separate keys; union is a set, so ordering and duplicates vanish
expected = parse_term('{result:Italian:{}, result:Celtic:{}, result:Portuguese:{}, result:Celtic:{}}')
print("\nequal to the expected set (in another order, with a duplicate):", decide_equal(result, expected))
