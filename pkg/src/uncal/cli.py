"""Command-line front end: ``uncal <command> ...``.

Exit codes: 0 success or equal, 1 syntax (or unreadable input), 2 type,
3 not equal, 4 internal error (including an exhausted rewrite budget).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .axioms import MUTANTS, check_axiom_catalogue
from .bisim import compare
from .errors import ArityError, CompileError, FuelExhausted, SubstError, UncalSyntaxError, UncalTypeError
from .normalize import STRATEGIES, embed, normalize, normalize_vec, show_mu, to_mu
from .structrec import compile_sfun, minimal, run_query
from .surface import format_label, ingest_tree, parse_program, parse_term, print_term

EXIT_OK, EXIT_SYNTAX, EXIT_TYPE, EXIT_NOT_EQUAL, EXIT_INTERNAL = 0, 1, 2, 3, 4


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UncalSyntaxError(f"cannot read {path}: {exc.strerror}") from None


def load_term(path):
    """A term from a ``.json`` document or a term file."""
    text = _read(path)
    if str(path).endswith(".json"):
        return ingest_tree(text)
    return parse_term(text)


def cmd_parse(args):
    t = load_term(args.file)
    print(print_term(t, annotate=args.annotate))


def cmd_typecheck(args):
    print(load_term(args.file).type)


def cmd_normalize(args):
    t = load_term(args.file)
    for n in normalize_vec(t, args.strategy):
        if args.minimal:
            n = normalize(minimal(embed(n, t.src)))
        print(show_mu(to_mu(n)) if args.mu else print_term(embed(n, t.src)))


def cmd_bisim(args):
    a, b = load_term(args.left), load_term(args.right)
    equal, info = compare(a, b)
    if equal:
        print("EQUAL")
        return EXIT_OK
    print("NOT-EQUAL")
    if args.witness:
        root, path = info
        where = f" (root {root + 1})" if len(a.tgt) > 1 else ""
        shown = ":".join(format_label(l) for l in path) if path else "(at the root)"
        print(f"witness{where}: {shown}")
    return EXIT_NOT_EQUAL


def cmd_ingest(args):
    print(print_term(ingest_tree(_read(args.file))))


def cmd_run(args):
    prog = parse_program(_read(args.program))
    data = load_term(args.data) if args.data else None
    blocks = {}

    def block_for(name):
        if name not in prog.functions:
            raise CompileError(f"no function named {name}")
        key = id(prog.block_of(name))
        if key not in blocks:
            blocks[key] = compile_sfun(prog.block_of(name))
        return blocks[key]

    if args.query:
        if data is None:
            raise CompileError("--query needs a data file")
        jobs = [(name, data) for name in args.query]
    elif prog.queries:
        jobs = [(name, _query_arg(prog, arg, data)) for name, arg in prog.queries]
    elif data is not None:
        jobs = [(next(iter(prog.functions)), data)]
    else:
        raise CompileError("nothing to run: give a data file or add query lines")
    for name, t in jobs:
        result = run_query(block_for(name), name, t)
        print(print_term(result))


def _query_arg(prog, arg, data):
    # query arguments are terms, binding names, or ``input`` for the data file
    if not isinstance(arg, str):
        return arg
    if arg in prog.bindings:
        return prog.bindings[arg]
    if data is None:
        raise CompileError(f"query argument {arg} needs a data file")
    return data


def _show(x):
    return print_term(x) if hasattr(x, "src") else show_mu(x)


def cmd_check_axioms(args):
    extra = MUTANTS if args.inject_mutant else None
    report = check_axiom_catalogue(samples=args.samples, seed=args.seed, group_samples=args.group_samples, extra_laws=extra)
    if args.json:
        rows = [
            {k: v for k, v in row.items() if k != "failures"}
            | {"failures": [[_show(l), _show(r)] for l, r in row["failures"]]}
            for row in report["laws"]
        ]
        print(json.dumps({"seed": report["seed"], "samples": report["samples"], "ok": report["ok"], "laws": rows}, indent=2))
    else:
        for row in report["laws"]:
            status = "ok" if row["passed"] == row["total"] else "FAIL"
            print(f"{row['kind']:8} {row['law']:16} {row['passed']:5}/{row['total']:<5} {status}")
        print("all laws pass" if report["ok"] else "some laws FAIL")
    return EXIT_OK if report["ok"] else EXIT_NOT_EQUAL


def build_parser():
    p = argparse.ArgumentParser(prog="uncal", description="Graph terms: parse, normalise, compare, query.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("parse", help="parse a term file and print it back")
    s.add_argument("file")
    s.add_argument("--annotate", action="store_true", help="show source contexts on leaves")
    s.set_defaults(fn=cmd_parse)

    s = sub.add_parser("typecheck", help="print the type of a term")
    s.add_argument("file")
    s.set_defaults(fn=cmd_typecheck)

    s = sub.add_parser("normalize", help="print the normal form of each root")
    s.add_argument("file")
    s.add_argument("--strategy", choices=STRATEGIES, default="default")
    s.add_argument("--mu", action="store_true", help="print as a mu-term")
    s.add_argument("--minimal", action="store_true", help="print the least equal form")
    s.set_defaults(fn=cmd_normalize)

    s = sub.add_parser("bisim", help="decide equality of two terms")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--witness", action="store_true", help="print a distinguishing label path")
    s.set_defaults(fn=cmd_bisim)

    s = sub.add_parser("run", help="run structural recursion queries")
    s.add_argument("program")
    s.add_argument("data", nargs="?")
    s.add_argument("--query", action="append", help="function to apply to the data (repeatable)")
    s.set_defaults(fn=cmd_run)

    s = sub.add_parser("ingest", help="read a JSON document as a tree term")
    s.add_argument("file")
    s.set_defaults(fn=cmd_ingest)

    s = sub.add_parser("check-axioms", help="validate the axiom catalogue on random instances")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--group-samples", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.add_argument("--inject-mutant", action="store_true", help="add an unsound law as a negative control")
    s.set_defaults(fn=cmd_check_axioms)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code = args.fn(args)
    except UncalSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except (UncalTypeError, SubstError, ArityError, CompileError) as exc:
        kind = "type error" if isinstance(exc, UncalTypeError) else "error"
        print(f"{kind}: {exc}", file=sys.stderr)
        return EXIT_TYPE
    except FuelExhausted as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except RecursionError:
        print("internal error: recursion limit exceeded", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
