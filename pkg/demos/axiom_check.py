"""Spot-check the equational laws on random instances.

Run:  python demos/axiom_check.py [samples]
"""
import sys

from uncal.axioms import MUTANTS, check_axiom_catalogue

samples = int(sys.argv[1]) if len(sys.argv) > 1 else 20
report = check_axiom_catalogue(samples=samples, seed=1, extra_laws=MUTANTS)
for row in report["laws"]:
    mark = "ok" if row["passed"] == row["total"] else "FAILS"
    print(f"{row['kind']:8} {row['law']:16} {row['passed']:4}/{row['total']:<4} {mark}")
# the relabelling mutant is there to show the checker can say no
print("sound laws all pass:", all(r["passed"] == r["total"] for r in report["laws"] if r["kind"] != "extra"))
