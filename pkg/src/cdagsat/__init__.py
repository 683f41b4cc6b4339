"""Clause-matrix / layered-graph 3-SAT decision procedure with a differential verification harness."""

from .cnf_io import Formula, emit_dimacs, parse_dimacs, read_dimacs, write_dimacs
from .core import Clause3, Literal, StringW
from .oracle import brute_force, clause_set_oracle, eval_formula
from .solver import SolveOptions, Verdict, check_certificate, solve

__all__ = [
    "Clause3",
    "Formula",
    "Literal",
    "SolveOptions",
    "StringW",
    "Verdict",
    "brute_force",
    "check_certificate",
    "clause_set_oracle",
    "emit_dimacs",
    "eval_formula",
    "parse_dimacs",
    "read_dimacs",
    "solve",
    "write_dimacs",
]
