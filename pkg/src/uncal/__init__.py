"""Graph terms with markers: typing, normal forms, bisimulation and
structural recursion."""

from .bisim import EqSystem, bisimilar, bounded_unfold, compare, compile, decide_equal, naive_bisim, partition
from .errors import (
    ArityError,
    CompileError,
    FuelExhausted,
    SubstError,
    UncalError,
    UncalSyntaxError,
    UncalTypeError,
)
from .normalize import embed, from_mu, normalize, normalize_vec, to_mu
from .structrec import apply_phi, apply_phi_vec, compile_sfun, minimal, readback, run_query
from .surface import ingest_tree, parse_program, parse_term, print_term
from .syntax import GraphType, typecheck

__all__ = [
    "ArityError",
    "CompileError",
    "EqSystem",
    "FuelExhausted",
    "GraphType",
    "SubstError",
    "UncalError",
    "UncalSyntaxError",
    "UncalTypeError",
    "apply_phi",
    "apply_phi_vec",
    "bisimilar",
    "bounded_unfold",
    "compare",
    "compile",
    "compile_sfun",
    "decide_equal",
    "embed",
    "from_mu",
    "ingest_tree",
    "minimal",
    "naive_bisim",
    "normalize",
    "normalize_vec",
    "parse_program",
    "parse_term",
    "partition",
    "print_term",
    "readback",
    "run_query",
    "to_mu",
    "typecheck",
]
