"""Enumeration-based ground truth for small formulas.

Both deciders walk the 2^n assignments with x_1 as the least significant
bit, so their witnesses are the numerically smallest satisfying assignment.
Neither touches the clause matrix or the graph machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .cnf_io import Formula
from .core import Assignment, CdagSatError, Literal, StringW, assignment_of_string

MAX_VARS = 26


class TooLarge(CdagSatError, ValueError):
    pass


@dataclass(frozen=True)
class OracleVerdict:
    satisfiable: bool
    witness: Assignment | None
    assignments_checked: int


def eval_formula(f: Formula, a: Sequence[bool]) -> bool:
    if len(a) != f.n:
        raise ValueError(f"assignment covers {len(a)} variables, formula has {f.n}")
    return all(any(bool(a[lit.var - 1]) ^ lit.negated for lit in c.lits) for c in f.clauses)


def _bits_to_assignment(bits: int, n: int) -> Assignment:
    return tuple(bool(bits >> p & 1) for p in range(n))


def _check_size(f: Formula) -> None:
    if f.n > MAX_VARS:
        raise TooLarge(f"{f.n} variables exceeds the enumeration cap of {MAX_VARS}")


def brute_force(f: Formula) -> OracleVerdict:
    _check_size(f)
    # a clause is satisfied when a positive var is 1 or a negated var is 0
    masks = []
    for c in f.clauses:
        pos = neg = 0
        for lit in c.lits:
            if lit.negated:
                neg |= 1 << (lit.var - 1)
            else:
                pos |= 1 << (lit.var - 1)
        masks.append((pos, neg))
    full = (1 << f.n) - 1
    for bits in range(1 << f.n):
        inv = full & ~bits
        if all(bits & pos or inv & neg for pos, neg in masks):
            return OracleVerdict(True, _bits_to_assignment(bits, f.n), bits + 1)
    return OracleVerdict(False, None, 1 << f.n)


def clause_set_oracle(f: Formula) -> OracleVerdict:
    """SAT iff some string's clause set misses every clause of the formula."""
    _check_size(f)
    banned = {tuple((lit.var, lit.negated) for lit in c.lits) for c in f.clauses}
    index_triples = list(combinations(range(f.n), 3))
    for bits in range(1 << f.n):
        w = StringW(tuple(bool(bits >> p & 1) for p in range(f.n)))
        lits = [Literal(p + 1, neg) for p, neg in enumerate(w.negated)]
        hit = False
        for i, j, k in index_triples:
            if (lits[i], lits[j], lits[k]) in banned:
                hit = True
                break
        if not hit:
            return OracleVerdict(True, assignment_of_string(w), bits + 1)
    return OracleVerdict(False, None, 1 << f.n)
